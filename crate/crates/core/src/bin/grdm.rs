fn main() {
    std::process::exit(grdm_core::cli::run_from(std::env::args_os()));
}
