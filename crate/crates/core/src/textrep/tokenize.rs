/// Lowercases and splits on every non-alphanumeric character.
///
/// ```
/// use densir::textrep::tokenize;
/// assert_eq!(tokenize("IR-2013 models"), ["ir", "2013", "models"]);
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(tokenize("Computer Architecture!"), ["computer", "architecture"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("  --  ").is_empty());
        assert_eq!(tokenize("Ünïcode Straße"), ["ünïcode", "straße"]);
    }
}
