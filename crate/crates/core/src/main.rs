fn main() {
    std::process::exit(ofdm_lssvm::cli::main_with(std::env::args_os()));
}
