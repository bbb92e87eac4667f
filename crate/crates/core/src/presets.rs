//! Bundled id lists.

/// Name accepted by `split --eval-list` for [`DIALAM_EVAL_78`].
pub const DIALAM_EVAL_78_NAME: &str = "dialam78";

/// The 78 DialAM-2024 training nodesets held out for evaluation.
pub const DIALAM_EVAL_78: [&str; 78] = [
    "nodeset18321", "nodeset21402", "nodeset21463", "nodeset23939", "nodeset18455", "nodeset19912",
    "nodeset23828", "nodeset21575", "nodeset17918", "nodeset23771", "nodeset21041", "nodeset18846",
    "nodeset18850", "nodeset23887", "nodeset18775", "nodeset21044", "nodeset18877", "nodeset23794",
    "nodeset23512", "nodeset25524", "nodeset21390", "nodeset23605", "nodeset23769", "nodeset23526",
    "nodeset17938", "nodeset19911", "nodeset20342", "nodeset21438", "nodeset18311", "nodeset19159",
    "nodeset19742", "nodeset23547", "nodeset18764", "nodeset21384", "nodeset21294", "nodeset19153",
    "nodeset20755", "nodeset23869", "nodeset17923", "nodeset20303", "nodeset23894", "nodeset23715",
    "nodeset23484", "nodeset20332", "nodeset23505", "nodeset21577", "nodeset21595", "nodeset19341",
    "nodeset21023", "nodeset23746", "nodeset20871", "nodeset25400", "nodeset18271", "nodeset20343",
    "nodeset21473", "nodeset21571", "nodeset25691", "nodeset21452", "nodeset18848", "nodeset23721",
    "nodeset18794", "nodeset25522", "nodeset25499", "nodeset21393", "nodeset17940", "nodeset23876",
    "nodeset23927", "nodeset23498", "nodeset23900", "nodeset19095", "nodeset20981", "nodeset21603",
    "nodeset21451", "nodeset18266", "nodeset25754", "nodeset19091", "nodeset23859", "nodeset23834",
];

/// Resolves a bundled list by name.
pub fn eval_preset(name: &str) -> Option<Vec<String>> {
    (name == DIALAM_EVAL_78_NAME).then(|| DIALAM_EVAL_78.iter().map(|s| s.to_string()).collect())
}
