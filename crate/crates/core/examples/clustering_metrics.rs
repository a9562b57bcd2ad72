// Partition agreement, silhouette and corpus BLEU on small inputs.

use dialstruct::evalmetrics::{adjusted_mutual_info, adjusted_rand_index, corpus_bleu, rand_index, silhouette};

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn run_example() -> dialstruct::Result<()> {
    let gold = [0, 0, 0, 1, 1, 1, 2, 2, 2];
    let cases: [(&str, [i64; 9]); 4] = [
        ("relabeled", [5, 5, 5, 7, 7, 7, 1, 1, 1]),
        ("one error", [0, 0, 1, 1, 1, 1, 2, 2, 2]),
        ("merged", [0, 0, 0, 0, 0, 0, 2, 2, 2]),
        ("scrambled", [0, 1, 2, 0, 1, 2, 0, 1, 2]),
    ];
    println!("{:<10} {:>7} {:>7} {:>7}", "", "RI", "ARI", "AMI");
    for (name, pred) in cases {
        println!(
            "{name:<10} {:>7.3} {:>7.3} {:>7.3}",
            rand_index(&gold, &pred)?,
            adjusted_rand_index(&gold, &pred)?,
            adjusted_mutual_info(&gold, &pred)?
        );
    }

    let points: Vec<Vec<f32>> = [[0.0, 0.0], [0.2, 0.1], [5.0, 5.0], [5.1, 4.8], [9.0, 0.0], [9.2, 0.3]]
        .iter()
        .map(|p| p.to_vec())
        .collect();
    println!("\nsilhouette, good split {:.3}", silhouette(&points, &[0, 0, 1, 1, 2, 2])?);
    println!("silhouette, bad split  {:.3}", silhouette(&points, &[0, 1, 2, 0, 1, 2])?);

    let refs = vec![words("there are 5 museums in the centre of town"), words("the taxi will arrive at 08:15")];
    let hyps = vec![words("there are 5 museums in the centre"), words("the taxi will arrive at 09:30")];
    println!("\nBLEU {:.2}", corpus_bleu(&refs, &hyps)?);
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
