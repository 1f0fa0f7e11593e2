//! Command-line front end: simulate netlists, check equivalence, decompose
//! unitaries, lower circuits and run the named protocols.
//!
//! Exit codes: 0 success, 1 usage, 2 file/grammar errors, 3 numeric or
//! unsupported-gate errors, 4 non-equivalent (for `equiv`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use spinnet_cli::text::{
    basis_label, matrix_from_floats, parse_circuit, parse_netlist, parse_state_spec,
    print_netlist,
};
use spinnet_cli::{csv_line, fmt_float};
use spinnet_core::gates::GateOp;
use spinnet_core::hardware::{apply_element, DetectorTarget, HardwareElement, Netlist};
use spinnet_core::linalg::global_phase_between;
use spinnet_core::metrics::entanglement_entropy;
use spinnet_core::protocols::{
    chsh_correlation, chsh_s, entanglement_swapping_layered, hyper_entangler,
    mode_mode_entangler, spin_bell_register, spin_mode_entangler_layered,
    stern_gerlach_p_up_polarized, stern_gerlach_unpolarized_p_up, BellOutcome, Layer,
    CHSH_CANONICAL_ANGLES, MODE_ENTANGLER_COUPLING,
};
use spinnet_core::state::{PureState, QubitRef};
use spinnet_core::synthesis::{euler_zxz, hardware_cost, lower_to_netlist};
use spinnet_core::{netlist_unitary, run_netlist};

#[derive(Parser)]
#[command(name = "spinnet", version, about = "Spintronic quantum network simulator and compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a netlist: exact amplitudes, or detector statistics over shots.
    Simulate(SimulateArgs),
    /// Compare two netlists up to a global phase.
    Equiv(EquivArgs),
    /// Synthesis helpers.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Lower a gate circuit file to a hardware netlist.
    Lower(LowerArgs),
    /// Run a named protocol and print its derived quantities.
    Protocol(ProtocolArgs),
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(SweepCommand),
}

#[derive(Args)]
struct SimulateArgs {
    /// Netlist file.
    netlist: PathBuf,
    /// Initial state, one token per electron, e.g. `u0,d1`.
    #[arg(long)]
    input: Option<String>,
    /// Number of measurement shots; 0 emits exact final amplitudes.
    #[arg(long, default_value_t = 0)]
    shots: usize,
    /// Base random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write results as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct EquivArgs {
    netlist_a: PathBuf,
    netlist_b: PathBuf,
    /// Max-abs entry tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Decompose a 2x2 unitary (eight floats, row-major re/im pairs) into
    /// zxz rotation angles.
    Euler {
        #[arg(num_args = 8, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct LowerArgs {
    /// Gate circuit file.
    circuit: PathBuf,
    /// Output netlist path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerArg {
    Gate,
    Hardware,
}

impl From<LayerArg> for Layer {
    fn from(value: LayerArg) -> Layer {
        match value {
            LayerArg::Gate => Layer::Gate,
            LayerArg::Hardware => Layer::Hardware,
        }
    }
}

#[derive(Args)]
struct ProtocolArgs {
    /// One of: spin-mode-entangle, mode-mode-entangle, entanglement-swap,
    /// entanglement-transfer, hyper-entangle, stern-gerlach, chsh.
    name: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repetitions for protocols with measurements.
    #[arg(long, default_value_t = 1)]
    shots: usize,
    /// Evolve through ideal gates or literal hardware elements.
    #[arg(long, value_enum, default_value_t = LayerArg::Gate)]
    layer: LayerArg,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Stern-Gerlach device angle (radians).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// Polarization angle of the prepared spin (radians).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta0: f64,
    /// Coulomb coupling phase for mode-mode-entangle.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// CHSH settings `a,a',b,b'` in radians.
    #[arg(long)]
    angles: Option<String>,
}

#[derive(Subcommand)]
enum SweepCommand {
    /// Sweep the Stern-Gerlach angle and emit `theta,p_up` pairs.
    SternGerlach(SternGerlachArgs),
    /// Evaluate the four CHSH correlations and the S combination.
    Chsh(ChshArgs),
}

#[derive(Args)]
struct SternGerlachArgs {
    /// Polarization angle of the input spin (radians).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta0: f64,
    /// Number of sweep points.
    #[arg(long, default_value_t = 37)]
    points: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Report in the half-angle convention, p = cos^2(t - t0).
    #[arg(long)]
    paper_angle: bool,
}

#[derive(Args)]
struct ChshArgs {
    /// Settings `a,a',b,b'` in radians; defaults to the canonical quadruple.
    #[arg(long)]
    angles: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Parse(String),
    Numeric(String),
    NotEquivalent(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::NotEquivalent(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Parse(m)
            | Failure::Numeric(m)
            | Failure::NotEquivalent(m) => m,
        }
    }
}

impl From<spinnet_core::Error> for Failure {
    fn from(e: spinnet_core::Error) -> Failure {
        Failure::Numeric(e.to_string())
    }
}

impl From<spinnet_cli::text::ParseError> for Failure {
    fn from(e: spinnet_cli::text::ParseError) -> Failure {
        Failure::Parse(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Equiv(args) => equiv(args),
        Command::Synth(SynthCommand::Euler { values }) => synth_euler(&values),
        Command::Lower(args) => lower(args),
        Command::Protocol(args) => protocol(args),
        Command::Sweep(SweepCommand::SternGerlach(args)) => sweep_stern_gerlach(args),
        Command::Sweep(SweepCommand::Chsh(args)) => sweep_chsh(args),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut out = csv_line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for row in rows {
        out.push_str(&csv_line(row));
    }
    std::fs::write(path, out)
        .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let netlist = parse_netlist(&read_file(&args.netlist)?)?;
    let initial = match &args.input {
        Some(spec) => parse_state_spec(spec, netlist.n_electrons)?,
        None => PureState::new_register(netlist.n_electrons)?,
    };
    if args.shots == 0 {
        simulate_exact(&netlist, &initial, args.csv.as_deref())
    } else {
        simulate_shots(&netlist, &initial, args.shots, args.seed, args.csv.as_deref())
    }
}

/// Exact amplitudes of the unitary part; detectors are inert here.
fn simulate_exact(
    netlist: &Netlist,
    initial: &PureState,
    csv: Option<&Path>,
) -> Result<(), Failure> {
    let mut state = initial.clone();
    for element in &netlist.elements {
        if element.is_detector() {
            continue;
        }
        state = apply_element(&state, element)?;
    }
    println!("final state over {} electrons:", state.n_electrons());
    let mut rows = Vec::new();
    for (b, amp) in state.amplitudes().iter().enumerate() {
        let label = basis_label(state.n_electrons(), b);
        rows.push(vec![
            b.to_string(),
            label.clone(),
            fmt_float(amp.re),
            fmt_float(amp.im),
            fmt_float(amp.norm_sqr()),
        ]);
        if amp.norm_sqr() > 1e-12 {
            println!(
                "  |{label}>  re {:+.9}  im {:+.9}  p {:.9}",
                amp.re,
                amp.im,
                amp.norm_sqr()
            );
        }
    }
    if let Some(path) = csv {
        write_csv(
            path,
            &["basis_index", "label", "amplitude_re", "amplitude_im", "probability"],
            &rows,
        )?;
    }
    Ok(())
}

/// Shot loop: every detector fires a projective measurement at its position
/// in element order. Seeds derive as `seed + shot * n_detectors + index`.
fn simulate_shots(
    netlist: &Netlist,
    initial: &PureState,
    shots: usize,
    seed: u64,
    csv: Option<&Path>,
) -> Result<(), Failure> {
    let n_detectors = netlist.elements.iter().filter(|e| e.is_detector()).count();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for shot in 0..shots {
        let mut state = initial.clone();
        let mut labels: Vec<String> = Vec::new();
        let mut detector_index = 0u64;
        for element in &netlist.elements {
            match element {
                HardwareElement::Detector { electron, target } => {
                    let targets: Vec<QubitRef> = match target {
                        DetectorTarget::Mode => vec![QubitRef::mode(*electron)],
                        DetectorTarget::Full => {
                            vec![QubitRef::spin(*electron), QubitRef::mode(*electron)]
                        }
                    };
                    let shot_seed =
                        seed + shot as u64 * n_detectors.max(1) as u64 + detector_index;
                    let record = state.measure(&targets, shot_seed)?;
                    labels.push(match target {
                        DetectorTarget::Mode => {
                            format!("k{electron}={}", u8::from(record.outcome[0]))
                        }
                        DetectorTarget::Full => format!(
                            "e{electron}={}{}",
                            if record.outcome[0] { 'd' } else { 'u' },
                            u8::from(record.outcome[1])
                        ),
                    });
                    state = record.post_state;
                    detector_index += 1;
                }
                other => state = apply_element(&state, other)?,
            }
        }
        let key = if labels.is_empty() {
            "(no detectors)".to_string()
        } else {
            labels.join(";")
        };
        *counts.entry(key).or_insert(0) += 1;
    }

    println!("outcome frequencies over {shots} shots (seed {seed}):");
    let mut rows = Vec::new();
    for (label, count) in &counts {
        let freq = *count as f64 / shots as f64;
        println!("  {label}  count {count}  frequency {freq:.6}");
        rows.push(vec![label.clone(), count.to_string(), fmt_float(freq)]);
    }
    if let Some(path) = csv {
        write_csv(path, &["outcome", "count", "frequency"], &rows)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// equiv
// ---------------------------------------------------------------------------

fn equiv(args: EquivArgs) -> Result<(), Failure> {
    if !args.tol.is_finite() || args.tol <= 0.0 {
        return Err(Failure::Usage("tolerance must be positive".into()));
    }
    let a = parse_netlist(&read_file(&args.netlist_a)?)?;
    let b = parse_netlist(&read_file(&args.netlist_b)?)?;
    if a.n_electrons != b.n_electrons {
        return Err(Failure::Numeric(format!(
            "netlists span different registers: {} vs {} electrons",
            a.n_electrons, b.n_electrons
        )));
    }
    let ua = netlist_unitary(&a)?;
    let ub = netlist_unitary(&b)?;
    match global_phase_between(&ua, &ub, args.tol)? {
        Some(lambda) => {
            println!("equivalent up to global phase {} rad", fmt_float(lambda));
            Ok(())
        }
        None => Err(Failure::NotEquivalent(format!(
            "netlists differ by more than a global phase at tolerance {:e}",
            args.tol
        ))),
    }
}

// ---------------------------------------------------------------------------
// synth euler
// ---------------------------------------------------------------------------

fn synth_euler(values: &[f64]) -> Result<(), Failure> {
    let values: &[f64; 8] = values
        .try_into()
        .map_err(|_| Failure::Usage("expected exactly 8 floats".into()))?;
    let u = matrix_from_floats(values);
    let angles = euler_zxz(&u)?;
    println!("lambda = {}", fmt_float(angles.global_phase));
    println!("theta1 = {}", fmt_float(angles.theta1));
    println!("theta2 = {}", fmt_float(angles.theta2));
    println!("theta3 = {}", fmt_float(angles.theta3));
    Ok(())
}

// ---------------------------------------------------------------------------
// lower
// ---------------------------------------------------------------------------

fn lower(args: LowerArgs) -> Result<(), Failure> {
    let circuit = parse_circuit(&read_file(&args.circuit)?)?;
    let netlist = lower_to_netlist(&circuit)?;
    std::fs::write(&args.out, print_netlist(&netlist))
        .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "lowered {} gates to {} hardware elements -> {}",
        circuit.ops.len(),
        hardware_cost(&netlist),
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// protocol
// ---------------------------------------------------------------------------

fn parse_angles(spec: &str) -> Result<[f64; 4], Failure> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(Failure::Usage(format!(
            "expected 4 comma-separated angles, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0f64; 4];
    for (slot, raw) in out.iter_mut().zip(parts) {
        *slot = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad angle `{raw}`")))?;
    }
    Ok(out)
}

fn print_derived(derived: &BTreeMap<String, f64>, csv: Option<&Path>) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for (name, value) in derived {
        println!("{name} = {}", fmt_float(*value));
        rows.push(vec![name.clone(), fmt_float(*value)]);
    }
    if let Some(path) = csv {
        write_csv(path, &["name", "value"], &rows)?;
    }
    Ok(())
}

fn protocol(args: ProtocolArgs) -> Result<(), Failure> {
    let layer: Layer = args.layer.into();
    let derived: BTreeMap<String, f64> = match args.name.as_str() {
        "spin-mode-entangle" => {
            let state = PureState::new_register(1)?;
            let out = spin_mode_entangler_layered(&state, 0, layer)?;
            let mut d = BTreeMap::new();
            d.insert(
                "entropy_bits".to_string(),
                entanglement_entropy(&out, &[QubitRef::spin(0)])?,
            );
            d.insert(
                "p_mode1".to_string(),
                out.amplitude(2).norm_sqr() + out.amplitude(3).norm_sqr(),
            );
            d
        }
        "mode-mode-entangle" => {
            let phi = args.phi.unwrap_or(MODE_ENTANGLER_COUPLING);
            mode_mode_entangler(phi)?.derived
        }
        "entanglement-swap" => {
            if args.shots <= 1 {
                entanglement_swapping_layered(args.seed, layer)?.derived
            } else {
                let mut counts = [0usize; 4];
                let mut min_concurrence = f64::INFINITY;
                for shot in 0..args.shots {
                    let result =
                        entanglement_swapping_layered(args.seed + shot as u64, layer)?;
                    counts[result.derived["outcome_index"] as usize] += 1;
                    min_concurrence = min_concurrence.min(result.derived["spin_concurrence"]);
                }
                let mut d = BTreeMap::new();
                for outcome in BellOutcome::all() {
                    d.insert(
                        format!("freq_{}", outcome.label()),
                        counts[outcome.index()] as f64 / args.shots as f64,
                    );
                }
                d.insert("min_spin_concurrence".to_string(), min_concurrence);
                d.insert("shots".to_string(), args.shots as f64);
                d
            }
        }
        "entanglement-transfer" => {
            // Spin-polarized, mode-Bell input.
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let mut amps = vec![spinnet_core::C64::new(0.0, 0.0); 16];
            amps[0] = spinnet_core::C64::new(r, 0.0);
            amps[10] = spinnet_core::C64::new(r, 0.0);
            let input = PureState::from_amplitudes(2, amps)?;
            let out = run_layered_transfer(&input, layer)?;
            let mut d = BTreeMap::new();
            d.insert(
                "mode_entropy_before".to_string(),
                entanglement_entropy(&input, &[QubitRef::mode(0)])?,
            );
            d.insert(
                "spin_entropy_before".to_string(),
                entanglement_entropy(&input, &[QubitRef::spin(0)])?,
            );
            d.insert(
                "mode_entropy_after".to_string(),
                entanglement_entropy(&out, &[QubitRef::mode(0)])?,
            );
            d.insert(
                "spin_entropy_after".to_string(),
                entanglement_entropy(&out, &[QubitRef::spin(0)])?,
            );
            d
        }
        "hyper-entangle" => {
            let mut state = PureState::new_register(2)?;
            state = spin_mode_entangler_layered(&state, 0, Layer::Gate)?;
            state = spin_mode_entangler_layered(&state, 1, Layer::Gate)?;
            let out = run_layered_hyper(&state, layer)?;
            let mut d = BTreeMap::new();
            d.insert(
                "spin_pair_entropy".to_string(),
                entanglement_entropy(&out, &[QubitRef::spin(0)])?,
            );
            d.insert(
                "mode_pair_entropy".to_string(),
                entanglement_entropy(&out, &[QubitRef::mode(0)])?,
            );
            d.insert(
                "spins_vs_modes_cut_entropy".to_string(),
                entanglement_entropy(&out, &[QubitRef::spin(0), QubitRef::spin(1)])?,
            );
            d
        }
        "stern-gerlach" => {
            let mut d = BTreeMap::new();
            d.insert(
                "p_up".to_string(),
                stern_gerlach_p_up_polarized(args.theta, args.theta0),
            );
            d.insert(
                "p_up_unpolarized".to_string(),
                stern_gerlach_unpolarized_p_up(args.theta, args.theta0),
            );
            d
        }
        "chsh" => {
            let angles = match &args.angles {
                Some(spec) => parse_angles(spec)?,
                None => CHSH_CANONICAL_ANGLES,
            };
            chsh_derived(&angles)?
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown protocol `{other}`; expected one of spin-mode-entangle, \
                 mode-mode-entangle, entanglement-swap, entanglement-transfer, \
                 hyper-entangle, stern-gerlach, chsh"
            )))
        }
    };
    print_derived(&derived, args.csv.as_deref())
}

fn run_layered_transfer(input: &PureState, layer: Layer) -> Result<PureState, Failure> {
    let circuit = spinnet_core::Circuit::new(
        2,
        vec![
            GateOp::swap(QubitRef::spin(0), QubitRef::mode(0)),
            GateOp::swap(QubitRef::spin(1), QubitRef::mode(1)),
        ],
    )?;
    run_layered(input, &circuit, layer)
}

fn run_layered_hyper(input: &PureState, layer: Layer) -> Result<PureState, Failure> {
    match layer {
        Layer::Gate => Ok(hyper_entangler(input)?),
        Layer::Hardware => {
            let circuit = spinnet_core::Circuit::new(
                2,
                vec![
                    GateOp::swap(QubitRef::mode(0), QubitRef::mode(1)),
                    GateOp::swap(QubitRef::spin(0), QubitRef::mode(0)),
                ],
            )?;
            run_layered(input, &circuit, layer)
        }
    }
}

fn run_layered(
    input: &PureState,
    circuit: &spinnet_core::Circuit,
    layer: Layer,
) -> Result<PureState, Failure> {
    match layer {
        Layer::Gate => Ok(spinnet_core::gates::run_circuit(input, circuit)?),
        Layer::Hardware => {
            let netlist = lower_to_netlist(circuit)?;
            Ok(run_netlist(input, &netlist)?)
        }
    }
}

fn chsh_derived(angles: &[f64; 4]) -> Result<BTreeMap<String, f64>, Failure> {
    let state = spin_bell_register(BellOutcome::PhiMinus)?;
    let [a, ap, b, bp] = *angles;
    let mut d = BTreeMap::new();
    d.insert("p_ab".to_string(), chsh_correlation(&state, a, b)?);
    d.insert("p_ab_prime".to_string(), chsh_correlation(&state, a, bp)?);
    d.insert("p_a_prime_b".to_string(), chsh_correlation(&state, ap, b)?);
    d.insert(
        "p_a_prime_b_prime".to_string(),
        chsh_correlation(&state, ap, bp)?,
    );
    d.insert("s".to_string(), chsh_s(&state, a, ap, b, bp)?);
    Ok(d)
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

fn sweep_stern_gerlach(args: SternGerlachArgs) -> Result<(), Failure> {
    if args.points < 2 {
        return Err(Failure::Usage("need at least 2 sweep points".into()));
    }
    // Device angles span a full period: 2 pi of axis angle, or pi in the
    // half-angle convention.
    let span = if args.paper_angle {
        std::f64::consts::PI
    } else {
        2.0 * std::f64::consts::PI
    };
    let mut rows = Vec::new();
    println!("theta,p_up");
    for i in 0..args.points {
        let t = span * i as f64 / (args.points - 1) as f64;
        let (axis_theta, axis_theta0) = if args.paper_angle {
            (2.0 * t, 2.0 * args.theta0)
        } else {
            (t, args.theta0)
        };
        let p = stern_gerlach_p_up_polarized(axis_theta, axis_theta0);
        println!("{},{}", fmt_float(t), fmt_float(p));
        rows.push(vec![fmt_float(t), fmt_float(p)]);
    }
    if let Some(path) = &args.csv {
        write_csv(path, &["theta", "p_up"], &rows)?;
    }
    Ok(())
}

fn sweep_chsh(args: ChshArgs) -> Result<(), Failure> {
    let angles = match &args.angles {
        Some(spec) => parse_angles(spec)?,
        None => CHSH_CANONICAL_ANGLES,
    };
    let derived = chsh_derived(&angles)?;
    let header = ["p_ab", "p_ab_prime", "p_a_prime_b", "p_a_prime_b_prime", "s"];
    let row: Vec<String> = header.iter().map(|k| fmt_float(derived[*k])).collect();
    println!("{}", header.join(","));
    println!("{}", row.join(","));
    if let Some(path) = &args.csv {
        write_csv(path, &header, &[row])?;
    }
    Ok(())
}
