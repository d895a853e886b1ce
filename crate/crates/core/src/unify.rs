//! Corpus-level detection of name-, institution- and career-sharing
//! co-author clusters, merged publication profiles, and bibliography
//! page savings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bibdata::{AuthorMention, CanonicalName, Corpus, NameKey, PaperRecord};
use crate::error::{Error, Location, Result};

/// How much a cluster shares beyond the name. Ordered from weakest to
/// strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SharingLevel {
    #[serde(rename = "name")]
    NameSharing,
    #[serde(rename = "name+institution")]
    NameAndInstitution,
    #[serde(rename = "full_aua")]
    FullAua,
}

impl SharingLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            SharingLevel::NameSharing => "name",
            SharingLevel::NameAndInstitution => "name+institution",
            SharingLevel::FullAua => "full_aua",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MemberRef {
    #[serde(rename = "record")]
    pub record_id: String,
    pub author_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuaCluster {
    /// Canonical "forename surname".
    pub canonical_name: CanonicalName,
    pub level: SharingLevel,
    /// Sorted by record id, then author index.
    pub members: Vec<MemberRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedProfile {
    pub publications_per_year: BTreeMap<i32, u64>,
    pub citations_per_year: BTreeMap<i32, u64>,
}

impl MergedProfile {
    pub fn total_publications(&self) -> u64 {
        self.publications_per_year.values().sum()
    }

    pub fn total_citations(&self) -> u64 {
        self.citations_per_year.values().sum()
    }
}

/// True iff both mentions have a career start with the same day and month.
pub fn career_sharing(a: &AuthorMention, b: &AuthorMention) -> bool {
    match (a.career_start, b.career_start) {
        (Some(x), Some(y)) => x.day == y.day && x.month == y.month,
        _ => false,
    }
}

fn level_of(mentions: &[&AuthorMention]) -> SharingLevel {
    let first = mentions[0];
    if !mentions.iter().all(|m| m.institution == first.institution) {
        return SharingLevel::NameSharing;
    }
    if mentions.iter().all(|m| career_sharing(first, m)) {
        SharingLevel::FullAua
    } else {
        SharingLevel::NameAndInstitution
    }
}

/// Groups every author mention by canonical name and emits one cluster per
/// group of two or more, at the highest level all members satisfy.
pub fn detect_clusters(corpus: &Corpus) -> Vec<AuaCluster> {
    let mut groups: BTreeMap<NameKey, Vec<(MemberRef, &AuthorMention)>> = BTreeMap::new();
    for record in corpus.records() {
        for (author_index, author) in record.authors.iter().enumerate() {
            // Corpus validation guarantees every name has a letter.
            let key = author.name_key().expect("validated author name");
            groups.entry(key).or_default().push((
                MemberRef {
                    record_id: record.id.clone(),
                    author_index,
                },
                author,
            ));
        }
    }

    let mut clusters: Vec<(String, NameKey, AuaCluster)> = groups
        .into_iter()
        .filter(|(_, members)| members.len() >= 2)
        .map(|(key, mut members)| {
            members.sort_by(|a, b| a.0.cmp(&b.0));
            let mentions: Vec<&AuthorMention> = members.iter().map(|(_, m)| *m).collect();
            let level = level_of(&mentions);
            let display = key.to_string();
            let canonical_name =
                crate::bibdata::normalize_text(&display).expect("non-empty canonical name");
            let cluster = AuaCluster {
                canonical_name,
                level,
                members: members.into_iter().map(|(r, _)| r).collect(),
            };
            (display, key, cluster)
        })
        .collect();
    clusters.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    clusters.into_iter().map(|(_, _, c)| c).collect()
}

/// Bundled yearly publication and citation counts of a cluster, counting
/// every contributing record once.
pub fn merge_profiles(cluster: &AuaCluster, corpus: &Corpus) -> Result<MergedProfile> {
    let mut records: BTreeMap<&str, &PaperRecord> = BTreeMap::new();
    for member in &cluster.members {
        let record = corpus.record(&member.record_id).ok_or_else(|| {
            Error::validation(
                Location::Record(member.record_id.clone()),
                "members",
                "cluster member refers to a missing record",
            )
        })?;
        if member.author_index >= record.authors.len() {
            return Err(Error::validation(
                Location::Record(member.record_id.clone()),
                "members",
                format!("author index {} out of range", member.author_index),
            ));
        }
        records.insert(record.id.as_str(), record);
    }

    let mut profile = MergedProfile {
        publications_per_year: BTreeMap::new(),
        citations_per_year: BTreeMap::new(),
    };
    for record in records.values() {
        *profile
            .publications_per_year
            .entry(record.year)
            .or_default() += 1;
        for (&year, &count) in &record.citations_per_year {
            *profile.citations_per_year.entry(year).or_default() += count;
        }
    }
    Ok(profile)
}

pub const DEFAULT_CHARS_PER_PAGE: usize = 3000;

/// Most a single record can save.
pub const MAX_PAGE_SAVINGS: f64 = 0.5;

/// Author list rendered as `F1 S1, F2 S2, ...`.
pub fn render_author_list(authors: &[AuthorMention]) -> String {
    authors
        .iter()
        .map(AuthorMention::rendered_name)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Author list with every maximal run of identical canonical names
/// collapsed into its first rendering.
pub fn render_unified_author_list(authors: &[AuthorMention]) -> Result<String> {
    let mut names: Vec<String> = Vec::new();
    let mut previous: Option<NameKey> = None;
    for author in authors {
        let key = author.name_key()?;
        if previous.as_ref() != Some(&key) {
            names.push(author.rendered_name());
        }
        previous = Some(key);
    }
    Ok(names.join(", "))
}

/// Fraction of a page saved by collapsing repeated adjacent author names,
/// capped at half a page.
pub fn page_savings(record: &PaperRecord, chars_per_page: usize) -> Result<f64> {
    if chars_per_page == 0 {
        return Err(Error::InvalidConfig(
            "chars_per_page must be positive".to_string(),
        ));
    }
    if record.authors.is_empty() {
        return Err(Error::EmptyAuthorSet);
    }
    let original = render_author_list(&record.authors).chars().count();
    let unified = render_unified_author_list(&record.authors)?.chars().count();
    let saved = (original - unified) as f64 / chars_per_page as f64;
    Ok(saved.min(MAX_PAGE_SAVINGS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bibdata::{CareerStart, Gender, Institution};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn wirth(inst: &str, start: Option<(u8, u8)>) -> AuthorMention {
        let mut m = AuthorMention::new("Vanessa", "Wirth", Gender::Female, inst);
        m.career_start = start.map(|(d, mo)| CareerStart::new(d, mo).unwrap());
        m
    }

    fn corpus(records: Vec<PaperRecord>) -> Corpus {
        Corpus::new(
            records,
            vec![
                Institution::new(
                    "fau",
                    "Friedrich-Alexander-Universität Erlangen-Nürnberg (FAU)",
                ),
                Institution::new("euv", "European University Viadrina"),
            ],
        )
        .unwrap()
    }

    fn paper(id: &str, year: i32, authors: Vec<AuthorMention>) -> PaperRecord {
        let mut record = PaperRecord::new(id, "t", year);
        record.authors = authors;
        record
    }

    #[test]
    fn career_sharing_examples() {
        let a = wirth("fau", Some((1, 4)));
        assert!(career_sharing(&a, &wirth("fau", Some((1, 4)))));
        assert!(!career_sharing(&a, &wirth("fau", Some((1, 5)))));
        assert!(!career_sharing(&a, &wirth("fau", None)));
        assert!(!career_sharing(&wirth("fau", None), &wirth("fau", None)));
    }

    #[test]
    fn ladder() {
        let full = corpus(vec![paper(
            "ours",
            2024,
            vec![wirth("fau", Some((1, 4))), wirth("fau", Some((1, 4)))],
        )]);
        let clusters = detect_clusters(&full);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].level, SharingLevel::FullAua);
        assert_eq!(clusters[0].canonical_name.as_str(), "vanessa wirth");
        assert_eq!(clusters[0].members.len(), 2);

        let inst = corpus(vec![paper(
            "p",
            2024,
            vec![wirth("fau", Some((1, 4))), wirth("fau", Some((2, 4)))],
        )]);
        assert_eq!(
            detect_clusters(&inst)[0].level,
            SharingLevel::NameAndInstitution
        );

        let name = corpus(vec![paper(
            "p",
            2024,
            vec![wirth("fau", Some((1, 4))), wirth("euv", Some((1, 4)))],
        )]);
        assert_eq!(detect_clusters(&name)[0].level, SharingLevel::NameSharing);
    }

    #[test]
    fn distinct_names_form_no_cluster() {
        let c = corpus(vec![paper(
            "p",
            2024,
            vec![
                AuthorMention::new("Allen", "Goodman", Gender::Male, "euv"),
                AuthorMention::new("Joshua", "Goodman", Gender::Male, "euv"),
            ],
        )]);
        assert!(detect_clusters(&c).is_empty());
        assert!(detect_clusters(&Corpus::default()).is_empty());
    }

    #[test]
    fn clusters_span_records_and_sort_by_name() {
        let otto = |inst: &str| AuthorMention::new("Philipp", "Otto", Gender::Male, inst);
        let c = corpus(vec![
            paper("b", 2020, vec![wirth("fau", None), otto("euv")]),
            paper("a", 2021, vec![otto("euv"), wirth("fau", None)]),
        ]);
        let clusters = detect_clusters(&c);
        let names: Vec<_> = clusters.iter().map(|c| c.canonical_name.as_str()).collect();
        assert_eq!(names, ["philipp otto", "vanessa wirth"]);
        assert_eq!(
            clusters[0].members,
            vec![
                MemberRef {
                    record_id: "a".into(),
                    author_index: 0
                },
                MemberRef {
                    record_id: "b".into(),
                    author_index: 1
                },
            ]
        );
    }

    #[test]
    fn merged_profile_counts_each_record_once() {
        let other = |n: &str| AuthorMention::new(n, "Other", Gender::Male, "fau");
        let a = || wirth("fau", None);
        let mut shared = paper("shared", 2023, vec![a(), a()]);
        shared.citations_per_year = [(2023, 4), (2024, 6)].into();
        let mut solo = paper("solo", 2019, vec![a(), other("X")]);
        solo.citations_per_year = [(2024, 1)].into();
        let c = corpus(vec![
            shared,
            solo,
            paper("x1", 2019, vec![other("Y"), a()]),
            paper("x2", 2019, vec![a()]),
        ]);
        let cluster = &detect_clusters(&c)[0];
        let profile = merge_profiles(cluster, &c).unwrap();
        assert_eq!(profile.publications_per_year, [(2019, 3), (2023, 1)].into());
        assert_eq!(profile.citations_per_year, [(2023, 4), (2024, 7)].into());
        assert_eq!(profile.total_publications(), 4);
    }

    #[test]
    fn merged_profile_without_citations() {
        let c = corpus(vec![paper(
            "p",
            2024,
            vec![wirth("fau", None), wirth("fau", None)],
        )]);
        let profile = merge_profiles(&detect_clusters(&c)[0], &c).unwrap();
        assert!(profile.citations_per_year.is_empty());
        assert_eq!(profile.publications_per_year, [(2024, 1)].into());
    }

    #[test]
    fn dangling_member_is_rejected() {
        let c = corpus(vec![paper(
            "p",
            2024,
            vec![wirth("fau", None), wirth("fau", None)],
        )]);
        let mut cluster = detect_clusters(&c)[0].clone();
        cluster.members.push(MemberRef {
            record_id: "gone".into(),
            author_index: 0,
        });
        assert!(matches!(
            merge_profiles(&cluster, &c),
            Err(Error::Validation { .. })
        ));
        cluster.members.pop();
        cluster.members.push(MemberRef {
            record_id: "p".into(),
            author_index: 9,
        });
        assert!(matches!(
            merge_profiles(&cluster, &c),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn page_savings_examples() {
        let record = paper("ours", 2024, vec![wirth("fau", None), wirth("fau", None)]);
        assert_eq!(
            render_author_list(&record.authors),
            "Vanessa Wirth, Vanessa Wirth"
        );
        assert_eq!(
            render_unified_author_list(&record.authors).unwrap(),
            "Vanessa Wirth"
        );
        assert_eq!(page_savings(&record, 3000).unwrap(), 15.0 / 3000.0);
        assert!((page_savings(&record, DEFAULT_CHARS_PER_PAGE).unwrap() - 0.005).abs() < 1e-15);

        let distinct = paper(
            "d",
            2024,
            vec![
                AuthorMention::new("Allen", "Goodman", Gender::Male, "euv"),
                AuthorMention::new("Joshua", "Goodman", Gender::Male, "euv"),
            ],
        );
        assert_eq!(page_savings(&distinct, 3000).unwrap(), 0.0);

        let huge = paper("h", 2024, vec![wirth("fau", None); 200]);
        assert_eq!(page_savings(&huge, 3000).unwrap(), 0.5);

        assert!(matches!(
            page_savings(&record, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn only_adjacent_runs_collapse() {
        let other = AuthorMention::new("Philipp", "Otto", Gender::Male, "euv");
        let authors = vec![wirth("fau", None), other, wirth("fau", None)];
        assert_eq!(
            render_unified_author_list(&authors).unwrap(),
            render_author_list(&authors)
        );
    }

    proptest! {
        #[test]
        fn savings_bounded_and_monotone(
            names in proptest::collection::vec(0usize..3, 1..12),
            extra in 0usize..20,
            chars_per_page in 1usize..400,
        ) {
            let pool = ["Vanessa", "Philipp", "Jörg"];
            let authors: Vec<AuthorMention> = names
                .iter()
                .map(|&i| AuthorMention::new(pool[i], "Wirth", Gender::Female, "fau"))
                .collect();
            let base = paper("p", 2024, authors.clone());
            let before = page_savings(&base, chars_per_page).unwrap();
            prop_assert!((0.0..=0.5).contains(&before));

            // repeat the first author `extra` more times next to itself
            let mut longer = authors.clone();
            for _ in 0..extra {
                longer.insert(0, authors[0].clone());
            }
            let after = page_savings(&paper("p", 2024, longer), chars_per_page).unwrap();
            prop_assert!(after >= before);
            prop_assert!((0.0..=0.5).contains(&after));
        }

        #[test]
        fn cluster_invariants(
            specs in proptest::collection::vec((0usize..3, 0usize..2, proptest::option::of(1u8..3)), 1..10)
        ) {
            let names = ["Vanessa", "Philipp", "Allen"];
            let insts = ["fau", "euv"];
            let authors: Vec<AuthorMention> = specs
                .iter()
                .map(|&(n, i, d)| {
                    let mut m = AuthorMention::new(names[n], "Wirth", Gender::Female, insts[i]);
                    m.career_start = d.map(|d| CareerStart::new(d, 4).unwrap());
                    m
                })
                .collect();
            let c = corpus(vec![paper("p", 2024, authors.clone())]);
            let clusters = detect_clusters(&c);
            let mut seen = BTreeSet::new();
            for cluster in &clusters {
                prop_assert!(cluster.members.len() >= 2);
                let mentions: Vec<&AuthorMention> =
                    cluster.members.iter().map(|m| &authors[m.author_index]).collect();
                let key = mentions[0].name_key().unwrap();
                prop_assert!(mentions.iter().all(|m| m.name_key().unwrap() == key));
                if cluster.level >= SharingLevel::NameAndInstitution {
                    prop_assert!(mentions.iter().all(|m| m.institution == mentions[0].institution));
                }
                if cluster.level == SharingLevel::FullAua {
                    prop_assert!(mentions.iter().all(|m| m.career_start.is_some()
                        && m.career_start == mentions[0].career_start));
                }
                for m in &cluster.members {
                    prop_assert!(seen.insert(m.clone()), "mention in two clusters");
                }
            }
        }
    }
}
