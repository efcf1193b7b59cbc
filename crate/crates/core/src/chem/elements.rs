//! Element data for the supported heavy-atom set.

/// Heavy-atom elements accepted by the SMILES subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Element {
    B,
    C,
    N,
    O,
    P,
    S,
    F,
    Cl,
    Br,
    I,
}

impl Element {
    /// Looks up an element by its case-sensitive symbol.
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        match symbol {
            "B" => Some(Element::B),
            "C" => Some(Element::C),
            "N" => Some(Element::N),
            "O" => Some(Element::O),
            "P" => Some(Element::P),
            "S" => Some(Element::S),
            "F" => Some(Element::F),
            "Cl" => Some(Element::Cl),
            "Br" => Some(Element::Br),
            "I" => Some(Element::I),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::P => "P",
            Element::S => "S",
            Element::F => "F",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn atomic_number(self) -> u32 {
        match self {
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::Br => 35,
            Element::I => 53,
        }
    }

    /// Valence electron count used by the Kier-Hall delta-v formula.
    pub fn valence_electrons(self) -> u32 {
        match self {
            Element::B => 3,
            Element::C => 4,
            Element::N => 5,
            Element::O => 6,
            Element::F | Element::Cl | Element::Br | Element::I => 7,
            Element::P => 5,
            Element::S => 6,
        }
    }

    /// Conventional standard atomic weight.
    pub fn atomic_weight(self) -> f64 {
        match self {
            Element::B => 10.81,
            Element::C => 12.011,
            Element::N => 14.007,
            Element::O => 15.999,
            Element::F => 18.998403163,
            Element::P => 30.973761998,
            Element::S => 32.06,
            Element::Cl => 35.45,
            Element::Br => 79.904,
            Element::I => 126.90447,
        }
    }

    /// Candidate default valences, smallest first. Multi-valent elements
    /// (P, S) list every normal valence; implicit-hydrogen assignment picks
    /// the smallest candidate that covers the bond order sum.
    pub fn default_valences(self) -> &'static [u32] {
        match self {
            Element::B => &[3],
            Element::C => &[4],
            Element::N => &[3],
            Element::O => &[2],
            Element::P => &[3, 5],
            Element::S => &[2, 4, 6],
            Element::F | Element::Cl | Element::Br | Element::I => &[1],
        }
    }

    /// Whether a lowercase (aromatic) form of the symbol is accepted.
    pub fn supports_aromatic(self) -> bool {
        matches!(
            self,
            Element::B | Element::C | Element::N | Element::O | Element::P | Element::S
        )
    }

    /// Charge-adjusted valence used for implicit-hydrogen assignment.
    ///
    /// Adjustment table:
    /// - B: valence - charge ([BH4-] is tetravalent)
    /// - C: valence - |charge| (both CH3+ and CH3- carry three hydrogens)
    /// - N, O, P, S, halogens: valence + charge ([NH4+], [OH3+], [O-], [Cl-])
    ///
    /// Clamped at zero.
    pub fn charge_adjusted_valence(self, base: u32, charge: i32) -> u32 {
        let base = i64::from(base);
        let charge = i64::from(charge);
        let adjusted = match self {
            Element::B => base - charge,
            Element::C => base - charge.abs(),
            _ => base + charge,
        };
        adjusted.max(0) as u32
    }
}

/// Standard atomic weight of hydrogen, for implicit/explicit H mass.
pub const HYDROGEN_WEIGHT: f64 = 1.008;
