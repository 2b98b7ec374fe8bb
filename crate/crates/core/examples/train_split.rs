//! Seeded 80/20 split of each altered category.

use afrnet::dataset::split;
use afrnet::dataset::synthetic::{generate, SyntheticConfig};
use afrnet::dataset::Level;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let images = generate(&SyntheticConfig::default());
    for level in Level::ALTERED {
        let names: Vec<&str> = images.iter().filter(|i| i.category == level).map(|i| i.file_name.as_str()).collect();
        let (train, test) = split(&names, 0.8, 42)?;
        println!("{level:<6} {} -> train {} / test {} (first test: {})", names.len(), train.len(), test.len(), test[0]);
    }
    Ok(())
}
