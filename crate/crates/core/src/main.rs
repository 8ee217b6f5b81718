fn main() {
    std::process::exit(genus_vd::cli::run(std::env::args_os()));
}
