fn main() {
    std::process::exit(zeronorm::cli::run(std::env::args_os()));
}
