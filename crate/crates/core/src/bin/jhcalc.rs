use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jhcalc::james_hopf::{hopf_star, OrderPolicy};
use jhcalc::lie_idempotent::{
    beta, check_idempotent, lie_rank, witt, Field, GradedAlphabet, PrimeField, Rationals, SignMode,
    TensorElement,
};
use jhcalc::report::{emit, exit_code, run_suite, series_instances, Format, SuiteConfig};
use jhcalc::series_decomp::{LnMethod, PowerSeries, SeriesInstance};
use jhcalc::shuffle_maps::{grouped_shuffles, koszul_degree, ShuffleOrder};
use jhcalc::group_words::{parse_word, DEFAULT_SEED};
use jhcalc::{Error, Result};

#[derive(Parser)]
#[command(name = "jhcalc", version, about = "Exact James-Hopf calculus and identity verification")]
struct Cli {
    /// Output format: text or json.
    #[arg(long, global = true, default_value = "text")]
    format: String,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification checks (all of them when none are named).
    Verify(VerifyArgs),
    /// Poincare-series decomposition for a named instance or a custom one.
    Series(SeriesArgs),
    /// List the grouped shuffles of (1..kl) and the Koszul degrees.
    Shuffles { k: usize, l: usize },
    /// Free Lie algebra dimension on d generators in weight n.
    Witt {
        n: u64,
        d: u64,
        /// Also compute the rank of beta_n over the rationals.
        #[arg(long)]
        rank: bool,
    },
    /// beta_n on d letters: idempotency and rank.
    Beta(BetaArgs),
    /// Evaluate a word in the coordinate ring.
    Rho {
        word: String,
        #[arg(long)]
        n: usize,
    },
    /// Apply (H_k)_* to a word and evaluate it.
    Hopf {
        k: usize,
        word: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Graded,
    Ungraded,
}

impl From<Mode> for SignMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Graded => SignMode::Graded,
            Mode::Ungraded => SignMode::Ungraded,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Matrix,
    Formula,
    Auto,
}

#[derive(Args)]
struct VerifyArgs {
    checks: Vec<String>,
    /// Largest number of coordinates (caps every grid).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// Restrict the prime-field checks to this prime.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    max_degree: Option<usize>,
    /// lex, reverse-lex or random(SEED); repeatable.
    #[arg(long)]
    order_policy: Vec<String>,
    /// canonical, reversed or shuffled.
    #[arg(long, default_value = "canonical")]
    shuffle_order: String,
    /// Skip comparing all shuffle orders.
    #[arg(long)]
    no_order_independence: bool,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value = "graded")]
    mode: Mode,
    /// Record wall-clock durations.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SeriesArgs {
    /// thm16, cor41, cor42 or custom.
    instance: String,
    #[arg(long)]
    max_degree: Option<usize>,
    /// Moore space dimension for cor42.
    #[arg(long, default_value_t = 4)]
    moore_n: usize,
    /// Coefficients of v for a custom instance, e.g. 0,2.
    #[arg(long, value_delimiter = ',')]
    v: Vec<i64>,
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, value_enum, default_value = "graded")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
}

#[derive(Args)]
struct BetaArgs {
    n: usize,
    d: usize,
    /// Work over F_p instead of the rationals.
    #[arg(long)]
    p: Option<u64>,
    /// Degree of every letter.
    #[arg(long, default_value_t = 0)]
    degree: u32,
    #[arg(long, value_enum, default_value = "ungraded")]
    mode: Mode,
}

fn shuffle_order(text: &str, seed: u64) -> Result<ShuffleOrder> {
    match text {
        "canonical" => Ok(ShuffleOrder::Canonical),
        "reversed" => Ok(ShuffleOrder::Reversed),
        "shuffled" => Ok(ShuffleOrder::Shuffled(seed)),
        other => Err(Error::Config(format!("unknown shuffle order '{other}'"))),
    }
}

fn verify(args: VerifyArgs, format: Format, seed: u64) -> Result<i32> {
    let mut config = SuiteConfig::default().with_seed(seed);
    if !args.checks.is_empty() {
        config.checks = args.checks.iter().map(|c| c.parse()).collect::<Result<_>>()?;
    }
    if let Some(n) = args.n {
        config.max_n = n;
        config.oracle_max_n = n;
        config.beta_max_n = config.beta_max_n.min(n);
        config.witt_max_n = config.witt_max_n.min(n);
    }
    if let Some(k) = args.k {
        config.max_k = k;
    }
    if let Some(l) = args.l {
        config.max_l = l;
    }
    if let Some(p) = args.p {
        config.primes = vec![p];
    }
    if let Some(d) = args.max_degree {
        config.max_degree = d;
    }
    if !args.order_policy.is_empty() {
        config.order_policies = args.order_policy.iter().map(|p| p.parse()).collect::<Result<Vec<OrderPolicy>>>()?;
    }
    if let Some(s) = args.samples {
        config.samples = s;
    }
    config.shuffle_order = shuffle_order(&args.shuffle_order, seed)?;
    config.order_independence = !args.no_order_independence;
    config.sign_mode = args.mode.into();
    config.timings = args.timings;
    let reports = run_suite(&config)?;
    print!("{}", emit(&reports, format));
    Ok(exit_code(&reports))
}

fn series(args: SeriesArgs, format: Format) -> Result<i32> {
    let mut config = SuiteConfig::default();
    if let Some(d) = args.max_degree {
        config.max_degree = d;
    }
    config.moore_n = args.moore_n;
    config.validate()?;
    let instance = if args.instance == "custom" {
        let p = args.p.ok_or_else(|| Error::Config("custom instance needs --p".into()))?;
        SeriesInstance {
            name: "custom".into(),
            description: "user supplied".into(),
            p,
            v: PowerSeries::new(args.v, config.max_degree),
            ks: args.ks,
        }
    } else {
        series_instances(&config)?
            .into_iter()
            .find(|i| i.name == args.instance)
            .ok_or_else(|| Error::Config(format!("unknown instance '{}' (thm16, cor41, cor42, custom)", args.instance)))?
    };
    let method = match args.method {
        Method::Matrix => LnMethod::Matrix,
        Method::Formula => LnMethod::Formula,
        Method::Auto => LnMethod::Auto,
    };
    let d = instance.run(args.mode.into(), method)?;
    let ok = d.nonnegative && d.dominated;
    match format {
        Format::Json => {
            let out = json!({ "instance": instance, "decomposition": d });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
        Format::Text => {
            println!("{}: {}", instance.name, instance.description);
            println!("p = {}, mode = {}, truncation = {}", d.p, d.mode, d.truncation);
            println!("v         {}", instance.v);
            println!("J(v)      {}", d.james);
            for f in &d.factors {
                println!("L_{:<7} {}", f.k, f.ln);
            }
            println!("product   {}", d.product);
            println!("residual  {}", d.residual);
            println!("nonnegative = {}, dominated = {}", d.nonnegative, d.dominated);
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn shuffles(k: usize, l: usize, format: Format) -> Result<i32> {
    if k == 0 || l == 0 || k * l > 12 {
        return Err(Error::Config(format!("need 1 <= k, l and kl <= 12, got k={k} l={l}")));
    }
    let list = grouped_shuffles(k, l);
    let (even, odd) = (koszul_degree(k, l, 2), koszul_degree(k, l, 1));
    match format {
        Format::Json => {
            let flat: Vec<Vec<usize>> = list.iter().map(|s| s.flattened()).collect();
            let out = json!({ "k": k, "l": l, "shuffles": flat, "degree_even": even, "degree_odd": odd });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
        Format::Text => {
            for s in &list {
                println!("{s}  inversions={}", s.inversions());
            }
            println!("count = {}, degree (even spheres) = {even}, degree (odd spheres) = {odd}", list.len());
        }
    }
    Ok(0)
}

fn witt_command(n: u64, d: u64, rank: bool, format: Format) -> Result<i32> {
    if n == 0 || d == 0 {
        return Err(Error::Config("n and d must be positive".into()));
    }
    let value = witt(n, d);
    let rank = if rank {
        if n as usize > 10 || d.pow(n as u32) > 100_000 {
            return Err(Error::Config("rank computation limited to d^n <= 100000, n <= 10".into()));
        }
        Some(lie_rank(n as usize, &GradedAlphabet::uniform(d as usize, 0), &Rationals, SignMode::Ungraded)?.total)
    } else {
        None
    };
    let agree = rank.map_or(true, |r| value == r.into());
    match format {
        Format::Json => println!("{}", json!({ "n": n, "d": d, "witt": value.to_string(), "rank": rank })),
        Format::Text => match rank {
            Some(r) => println!("witt({n}, {d}) = {value}, rank of beta_{n} = {r}"),
            None => println!("witt({n}, {d}) = {value}"),
        },
    }
    Ok(if agree { 0 } else { 1 })
}

fn beta_report<F: Field>(args: &BetaArgs, field: &F, label: &str, format: Format) -> Result<i32> {
    let alphabet = GradedAlphabet::uniform(args.d, args.degree);
    let mode: SignMode = args.mode.into();
    let verdict = check_idempotent(args.n, &alphabet, mode, field)?;
    let rank = lie_rank(args.n, &alphabet, field, mode)?;
    let sample: Vec<u16> = (0..args.n).map(|i| (i % args.d) as u16).collect();
    let image = beta(args.n, &TensorElement::basis(field.clone(), sample.clone()), &alphabet, mode)?;
    match format {
        Format::Json => {
            let out = json!({
                "n": args.n, "d": args.d, "field": label, "mode": mode.to_string(),
                "idempotent": verdict, "rank": rank,
                "example": { "word": alphabet.render(&sample), "image": image.render(&alphabet) },
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
        Format::Text => {
            println!("beta_{}({}) = {}", args.n, alphabet.render(&sample), image.render(&alphabet));
            println!(
                "beta_{n} o beta_{n} = {n} beta_{n} over {label} ({mode}): {} on {} words",
                if verdict.holds { "holds" } else { "FAILS" },
                verdict.words_checked,
                n = args.n,
            );
            println!("rank = {} by degree {:?}", rank.total, rank.by_degree);
        }
    }
    Ok(if verdict.holds { 0 } else { 1 })
}

fn beta_command(args: BetaArgs, format: Format) -> Result<i32> {
    if args.d == 0 || args.n > 10 || (args.d as f64).powi(args.n as i32) > 200_000.0 {
        return Err(Error::Config("need d >= 1, n <= 10 and d^n <= 200000".into()));
    }
    match args.p {
        None => beta_report(&args, &Rationals, "Q", format),
        Some(p) => beta_report(&args, &PrimeField::new(p)?, &format!("F{p}"), format),
    }
}

fn run(cli: Cli) -> Result<i32> {
    let format: Format = cli.format.parse()?;
    match cli.command {
        Command::Verify(args) => verify(args, format, cli.seed),
        Command::Series(args) => series(args, format),
        Command::Shuffles { k, l } => shuffles(k, l, format),
        Command::Witt { n, d, rank } => witt_command(n, d, rank, format),
        Command::Beta(args) => beta_command(args, format),
        Command::Rho { word, n } => {
            let w = parse_word(&word, n)?;
            let value = w.rho();
            match format {
                Format::Json => println!("{}", json!({ "word": w.to_string(), "rho": value.to_coefficient_map() })),
                Format::Text => println!("{value}"),
            }
            Ok(0)
        }
        Command::Hopf { k, word, n } => {
            let w = hopf_star(k, &parse_word(&word, n)?)?;
            let value = w.rho();
            match format {
                Format::Json => println!("{}", json!({ "word": w.to_string(), "rho": value.to_coefficient_map() })),
                Format::Text => {
                    println!("{w}");
                    println!("rho = {value}");
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
