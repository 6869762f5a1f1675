fn main() {
    let out = effk_cli::run(std::env::args_os());
    if out.code == 0 {
        print!("{}", out.text);
    } else {
        eprint!("{}", out.text);
    }
    std::process::exit(out.code);
}
