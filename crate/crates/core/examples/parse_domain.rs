//! Parse hostnames into labels and print their confusable skeletons.
//!
//! cargo run --example parse_domain -- xn--pypal-4ve.com rnicrosoft.com

use squatlab::{parse_domain, ConfusableTable};

fn main() {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        args = ["Go0gle.com", "xn--pypal-4ve.com", "mail.rnicrosoft.com", "müller.de", "google[.]com"]
            .map(String::from)
            .to_vec();
    }
    let table = ConfusableTable::bundled();
    for raw in &args {
        match parse_domain(raw, None) {
            Ok(d) => println!(
                "{raw:24} unicode={:20} ascii={:24} sld={:10} tld={:6} skeleton={}",
                d.unicode(),
                d.ascii(),
                d.sld(),
                d.tld(),
                table.skeleton(d.sld())
            ),
            Err(e) => println!("{raw:24} error: {e}"),
        }
    }
}
