fn main() {
    std::process::exit(wlspectra::cli::run());
}
