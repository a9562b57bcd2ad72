use crate::corpus::BioLabel;

/// Inclusive token ranges of the slot spans in a label sequence.
///
/// A span opens at `B`, or at an `I` that does not continue a span (orphan
/// repair), runs through consecutive `I`s and closes before the next `B`, `O`
/// or the end of the sequence.
pub fn extract_spans(labels: &[BioLabel]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (i, label) in labels.iter().enumerate() {
        match label {
            BioLabel::B => {
                if let Some(start) = open.replace(i) {
                    spans.push((start, i - 1));
                }
            }
            BioLabel::I => {
                open.get_or_insert(i);
            }
            BioLabel::O => {
                if let Some(start) = open.take() {
                    spans.push((start, i - 1));
                }
            }
        }
    }
    if let Some(start) = open {
        spans.push((start, labels.len() - 1));
    }
    spans
}
