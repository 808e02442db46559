//! Prints one generated description per problem class.
//!
//! cargo run -p milpgen --example describe -- 7

use milpgen::classes::{generate_class_instance, ClassId, ClassSizes};
use milpgen::sampler::SamplerConfig;
use milpgen::solve::SolverConfig;
use milpgen::template::describe_class;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for class in ClassId::ALL {
        let inst = generate_class_instance(class, &ClassSizes::default(), &SamplerConfig::default(), seed, &SolverConfig::default())
            .expect("generation");
        let described = describe_class(&inst, None, seed).expect("template");
        println!("== {class} ({}) optimum {}", described.template, inst.optimum);
        println!("{}\n", described.render(Some(seed)).expect("values"));
    }
}
