fn main() {
    std::process::exit(nhspec::cli::run(std::env::args_os()));
}
