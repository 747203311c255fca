//! The identity registry: dispatch names, default tolerances and budgets.

/// Default configuration of one registered identity.
#[derive(Debug, Clone, Copy)]
pub struct IdentityEntry {
    pub name: &'static str,
    pub default_tol: f64,
    pub default_grid: usize,
    pub default_n: usize,
    pub default_samples: usize,
    pub default_m_cap: f64,
    pub default_modulus_cap: f64,
    pub conjecture: bool,
    pub quadrature: bool,
    pub description: &'static str,
}

pub const REGISTRY: &[IdentityEntry] = &[
    IdentityEntry {
        name: "univariate",
        default_tol: 1e-9,
        default_grid: 256,
        default_n: 1,
        default_samples: 5,
        default_m_cap: 0.3,
        default_modulus_cap: 0.85,
        conjecture: false,
        quadrature: true,
        description: "univariate elliptic beta integral (six-parameter symmetric form)",
    },
    IdentityEntry {
        name: "an",
        default_tol: 1e-7,
        default_grid: 128,
        default_n: 2,
        default_samples: 3,
        default_m_cap: 0.15,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: true,
        description: "A_n type I elliptic beta integral",
    },
    IdentityEntry {
        name: "cn",
        default_tol: 1e-7,
        default_grid: 128,
        default_n: 2,
        default_samples: 3,
        default_m_cap: 0.15,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: true,
        description: "C_n type I elliptic beta integral",
    },
    IdentityEntry {
        name: "new_an",
        default_tol: 1e-7,
        default_grid: 128,
        default_n: 2,
        default_samples: 3,
        default_m_cap: 0.09,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: true,
        description: "new A_n elliptic beta integral",
    },
    IdentityEntry {
        name: "new_an_qlimit",
        default_tol: 1e-8,
        default_grid: 128,
        default_n: 2,
        default_samples: 3,
        default_m_cap: 0.2,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: true,
        description: "p -> 0 limit of the new A_n integral (q-Pochhammer form)",
    },
    IdentityEntry {
        name: "inversion_n1",
        default_tol: 1e-7,
        default_grid: 256,
        default_n: 1,
        default_samples: 6,
        default_m_cap: 0.15,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: true,
        description: "n = 1 integral inversion (residue-corrected double integral)",
    },
    IdentityEntry {
        name: "bailey_n1",
        default_tol: 1e-7,
        default_grid: 256,
        default_n: 1,
        default_samples: 4,
        default_m_cap: 0.15,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: true,
        description: "n = 1 integral transform pair (forward and return)",
    },
    IdentityEntry {
        name: "ros",
        default_tol: 1e-11,
        default_grid: 0,
        default_n: 2,
        default_samples: 10,
        default_m_cap: 0.3,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "A_n-type finite elliptic hypergeometric summation",
    },
    IdentityEntry {
        name: "eb",
        default_tol: 1e-11,
        default_grid: 0,
        default_n: 2,
        default_samples: 10,
        default_m_cap: 0.3,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "companion finite elliptic hypergeometric summation",
    },
    IdentityEntry {
        name: "theta1",
        default_tol: 1e-10,
        default_grid: 0,
        default_n: 2,
        default_samples: 20,
        default_m_cap: 0.4,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "theta-function addition identity with spectator parameters",
    },
    IdentityEntry {
        name: "theta2",
        default_tol: 1e-10,
        default_grid: 0,
        default_n: 2,
        default_samples: 20,
        default_m_cap: 0.4,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "t-dependent theta sum equal to one",
    },
    IdentityEntry {
        name: "theta3",
        default_tol: 1e-10,
        default_grid: 0,
        default_n: 2,
        default_samples: 20,
        default_m_cap: 0.4,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "n-variable theta identity with multiplicative balancing",
    },
    IdentityEntry {
        name: "an_pf",
        default_tol: 1e-10,
        default_grid: 0,
        default_n: 2,
        default_samples: 20,
        default_m_cap: 0.4,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "A_n elliptic partial fraction expansion",
    },
    IdentityEntry {
        name: "c_pf",
        default_tol: 1e-10,
        default_grid: 0,
        default_n: 2,
        default_samples: 20,
        default_m_cap: 0.4,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "C-type elliptic partial fraction expansion",
    },
    IdentityEntry {
        name: "qdiff",
        default_tol: 1e-10,
        default_grid: 0,
        default_n: 2,
        default_samples: 20,
        default_m_cap: 0.4,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "q-difference relation for the normalized kernel",
    },
    IdentityEntry {
        name: "contiguous",
        default_tol: 1e-9,
        default_grid: 0,
        default_n: 2,
        default_samples: 20,
        default_m_cap: 0.4,
        default_modulus_cap: 0.8,
        conjecture: false,
        quadrature: false,
        description: "contiguous relation for the new A_n closed form",
    },
];

pub fn lookup(name: &str) -> Option<&'static IdentityEntry> {
    REGISTRY.iter().find(|e| e.name == name)
}

pub fn print_list() {
    println!("{:<15} {:>9} {:>6} {:>3} {}", "identity", "tol", "grid", "n", "description");
    for e in REGISTRY {
        let grid = if e.quadrature {
            e.default_grid.to_string()
        } else {
            "-".to_string()
        };
        println!(
            "{:<15} {:>9.0e} {:>6} {:>3} {}",
            e.name, e.default_tol, grid, e.default_n, e.description
        );
    }
}
