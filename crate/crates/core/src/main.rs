fn main() {
    std::process::exit(dram_oracle::cli::run(std::env::args_os()));
}
