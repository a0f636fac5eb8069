//! Windows given by containment exponents relative to a reference vertex Γ:
//! α = min{j ≥ 0 : p^jΓ ⊆ Λ}, β = min{j ≥ 0 : Λ ⊆ p^{-j}Γ}.

/// The window {α ≤ a, β ≤ b, α + β ≤ c}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Bounds {
    pub fn new(a: u32, b: u32, c: u32) -> Self {
        Self { a, b, c: c.min(a + b) }
    }

    pub fn admits(&self, alpha: u32, beta: u32) -> bool {
        alpha <= self.a && beta <= self.b && alpha + beta <= self.c
    }

    pub fn grow(self, da: u32, db: u32, dc: u32) -> Self {
        Self::new(self.a + da, self.b + db, self.c + dc)
    }

    /// Window holding every vertex that contains a vertex of `self`.
    pub fn container(self) -> Self {
        self.grow(0, 1, 1)
    }

    /// Window holding every vertex contained in a container of a vertex of `self`.
    pub fn sub_witness(self) -> Self {
        self.grow(1, 1, 2)
    }

    /// Smallest window holding all the given exponent pairs.
    pub fn hull<I: IntoIterator<Item = (u32, u32)>>(it: I) -> Self {
        let (mut a, mut b, mut c) = (0, 0, 0);
        for (x, y) in it {
            a = a.max(x);
            b = b.max(y);
            c = c.max(x + y);
        }
        Self::new(a, b, c)
    }
}
