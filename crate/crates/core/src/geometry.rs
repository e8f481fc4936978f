/// Row/column organization of a simulated DRAM device, in 64-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub n_rows: u64,
    pub words_per_row: u64,
}

impl Geometry {
    pub fn new(n_rows: u64, words_per_row: u64) -> Self {
        Geometry { n_rows, words_per_row }
    }

    pub fn capacity_words(&self) -> u64 {
        self.n_rows * self.words_per_row
    }

    pub fn row_of(&self, word: u64) -> u64 {
        word / self.words_per_row
    }
}

impl Default for Geometry {
    /// 2048 rows of 8 KiB (16 MiB).
    fn default() -> Self {
        Geometry { n_rows: 2048, words_per_row: 1024 }
    }
}
