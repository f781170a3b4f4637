use std::collections::BTreeMap;
use std::path::Path;

use dfscodec::circuit::{build_encoding_circuit, gate_count_report, CircuitPlan};
use dfscodec::codec::{
    decode, encode, outcome_probabilities, roundtrip, split_seed, transmit, ChannelKind, ChannelSpec, TokenSet,
};
use dfscodec::group::{abelian_basis, FiniteGroup};
use dfscodec::linalg::C64;
use dfscodec::rep::{contains_regular, min_r, multiplicities, CharacterTable, UnitaryRep};
use dfscodec::statevec::{StateDump, StateVector};
use dfscodec::su2::{su2_demo_with, LogicalEncoding};
use dfscodec::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::{CircuitCmd, Cli, Command, DecodeArgs, DemoCmd, GroupCmd, RepCmd, RepSource, RoundtripArgs, TokensCmd};
use crate::error::{CliError, CliResult};
use crate::report::{resolve_seed, to_value, write_json, Report};
use crate::source::{load_builtin_group, load_group, load_group_file, load_rep, load_table, read_file, InputDigest, LoadedGroup};

pub fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Group(GroupCmd::Validate { file }) => group_validate(file),
        Command::Group(GroupCmd::Info { builtin, file }) => group_info(builtin.as_deref(), file.as_deref()),
        Command::Rep(RepCmd::Analyze { source, n_max, r_max }) => rep_analyze(source, *n_max, *r_max),
        Command::Rep(RepCmd::MinR { source, r_max }) => rep_min_r(source, *r_max),
        Command::Tokens(TokensCmd::Build { source, r, dump_state }) => tokens_build(source, *r, dump_state.as_deref()),
        Command::Roundtrip(args) => roundtrip_cmd(args),
        Command::Decode(args) => decode_cmd(args),
        Command::Circuit(CircuitCmd::Count { source, m, path }) => circuit_count(source, *m, *path),
        Command::Circuit(CircuitCmd::Simulate {
            source,
            m,
            path,
            t_stage,
            verify,
            trials,
            seed,
            tol,
            export,
        }) => circuit_simulate(source, *m, *path, *t_stage, *verify, *trials, *seed, *tol, export.as_deref()),
        Command::Demo(DemoCmd::Su2 { trials, seed, c, d }) => demo_su2(*trials, *seed, c, d),
    }
}

struct Resolved {
    group: LoadedGroup,
    rep: UnitaryRep,
    table: CharacterTable,
    rep_digest: InputDigest,
    table_digest: InputDigest,
}

impl Resolved {
    fn attach(&self, report: Report) -> Report {
        report
            .input("group", self.group.digest.clone())
            .input("rep", self.rep_digest.clone())
            .input("table", self.table_digest.clone())
    }

    fn tokens(&self, r: Option<usize>) -> CliResult<TokenSet> {
        Ok(match r {
            Some(r) => TokenSet::with_r(&self.rep, &self.table, r)?,
            None => TokenSet::canonical(&self.rep, &self.table)?,
        })
    }

    fn label(&self, g: usize) -> String {
        self.group.group.label(g).to_string()
    }
}

fn pick<'a>(flag: &'a Option<String>, pos: &'a Option<String>, what: &str) -> CliResult<Option<&'a str>> {
    match (flag, pos) {
        (Some(_), Some(_)) => Err(CliError::Usage(format!("{what} given both positionally and as --{what}"))),
        (Some(v), None) | (None, Some(v)) => Ok(Some(v.as_str())),
        (None, None) => Ok(None),
    }
}

fn resolve(src: &RepSource) -> CliResult<Resolved> {
    let group_spec = pick(&src.group, &src.group_pos, "group")?
        .ok_or_else(|| CliError::Usage("a group is required (--group or positional)".into()))?;
    let rep_spec = pick(&src.rep, &src.rep_pos, "rep")?.unwrap_or("builtin");
    let group = load_group(group_spec)?;
    let (rep, rep_digest) = load_rep(rep_spec, &group)?;
    let (table, table_digest) = load_table(src.table.as_deref(), &group)?;
    Ok(Resolved {
        group,
        rep,
        table,
        rep_digest,
        table_digest,
    })
}

fn group_summary(group: &FiniteGroup) -> serde_json::Value {
    let classes = group.conjugacy_classes();
    json!({
        "order": group.order(),
        "abelian": group.is_abelian(),
        "classes": classes.count(),
        "class_sizes": classes.sizes(),
    })
}

fn group_validate(file: &Path) -> CliResult<Report> {
    let loaded = load_group_file(file)?;
    let mut result = group_summary(&loaded.group);
    result["valid"] = json!(true);
    Ok(Report::new("group validate", json!({ "file": loaded.digest.source }), result)?
        .input("group", loaded.digest))
}

fn group_info(builtin: Option<&str>, file: Option<&Path>) -> CliResult<Report> {
    let loaded = match (builtin, file) {
        (Some(name), _) => load_builtin_group(name)?,
        (None, Some(path)) => load_group_file(path)?,
        (None, None) => return Err(CliError::Usage("give --builtin NAME or a group file".into())),
    };
    let g = &loaded.group;
    let classes = g.conjugacy_classes();
    let class_list: Vec<_> = classes
        .classes()
        .iter()
        .map(|members| {
            json!({
                "representative": g.label(members[0]),
                "size": members.len(),
                "members": members.iter().map(|&x| g.label(x)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let generators = if g.is_abelian() {
        Some(abelian_basis(g)?.iter().map(|&x| g.label(x).to_string()).collect::<Vec<_>>())
    } else {
        None
    };
    let irrep_dims = match &loaded.builtin {
        Some(b) => Some(CharacterTable::for_builtin(b)?.dims().to_vec()),
        None => None,
    };
    let result = json!({
        "order": g.order(),
        "abelian": g.is_abelian(),
        "labels": g.labels(),
        "element_orders": g.elements().map(|x| g.element_order(x)).collect::<Vec<_>>(),
        "inverses": g.elements().map(|x| g.inverse(x)).collect::<Vec<_>>(),
        "conjugacy_classes": class_list,
        "abelian_generators": generators,
        "irrep_dims": irrep_dims,
    });
    Ok(Report::new("group info", json!({ "group": loaded.digest.source }), result)?.input("group", loaded.digest))
}

#[derive(Serialize)]
struct PowerRow {
    n: usize,
    linear: bool,
    gammas: Option<Vec<usize>>,
    residue: Option<f64>,
    contains_regular: Option<bool>,
}

fn rep_analyze(src: &RepSource, n_max: Option<usize>, r_max: usize) -> CliResult<Report> {
    let res = resolve(src)?;
    let rep = &res.rep;
    let faithful = match rep.is_faithful() {
        Ok(()) => None,
        Err(e @ Error::NotFaithful { .. }) => Some(e.to_string()),
        Err(e) => return Err(e.into()),
    };
    let (r, r_note) = match min_r(rep, &res.table, r_max) {
        Ok(r) => (Some(r), None),
        Err(e @ (Error::NotFaithful { .. } | Error::RMaxExceeded { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let top = n_max.or(r).unwrap_or(4);
    let mut powers = Vec::with_capacity(top);
    for n in 1..=top {
        let linear = rep.power_is_linear(n);
        let row = if linear {
            let mv = multiplicities(rep, &res.table, n)?;
            PowerRow {
                n,
                linear,
                contains_regular: Some(contains_regular(&mv, &res.table)),
                residue: Some(mv.residue),
                gammas: Some(mv.gammas),
            }
        } else {
            PowerRow {
                n,
                linear,
                gammas: None,
                residue: None,
                contains_regular: None,
            }
        };
        powers.push(row);
    }
    let result = json!({
        "group_order": rep.group().order(),
        "d": rep.dim(),
        "linear": rep.is_linear(),
        "diagonal": rep.is_diagonal(),
        "faithful": faithful.is_none(),
        "not_faithful": faithful,
        "irrep_dims": res.table.dims(),
        "table_orthogonality_residue": res.table.orthogonality_residue(),
        "min_r": r,
        "min_r_failure": r_note,
        "powers": to_value(&powers)?,
    });
    let config = json!({ "n_max": n_max, "r_max": r_max });
    Ok(res.attach(Report::new("rep analyze", config, result)?))
}

fn rep_min_r(src: &RepSource, r_max: usize) -> CliResult<Report> {
    let res = resolve(src)?;
    let r = min_r(&res.rep, &res.table, r_max)?;
    let result = json!({ "r": r });
    Ok(res.attach(Report::new("rep min-r", json!({ "r_max": r_max }), result)?))
}

fn tokens_build(src: &RepSource, r: Option<usize>, dump: Option<&Path>) -> CliResult<Report> {
    let res = resolve(src)?;
    let tokens = res.tokens(r)?;
    if let Some(path) = dump {
        let dumps: Vec<StateDump> = tokens.tokens().iter().map(StateVector::dump).collect();
        write_json(path, &dumps)?;
    }
    let result = json!({
        "group_order": tokens.group_order(),
        "d": tokens.d(),
        "r": tokens.r(),
        "fiducial": tokens.fiducial().dump(),
        "gram_residue": tokens.gram_residue(),
        "closure_residue": tokens.closure_residue(),
        "commutator_residue": tokens.commutator_residue(),
    });
    Ok(res.attach(Report::new("tokens build", json!({ "r": r }), result)?))
}

fn parse_dist(spec: &str, res: &Resolved) -> CliResult<ChannelSpec> {
    let group = &res.group.group;
    if spec == "uniform" {
        return Ok(ChannelSpec::uniform(&res.rep));
    }
    if let Some(el) = spec.strip_prefix("fixed:") {
        let g = match el.parse::<usize>() {
            Ok(g) => g,
            Err(_) => group
                .labels()
                .iter()
                .position(|l| l == el)
                .ok_or_else(|| CliError::Usage(format!("no element labelled '{el}'")))?,
        };
        return Ok(ChannelSpec::fixed(&res.rep, g)?);
    }
    if let Some(list) = spec.strip_prefix("weights:") {
        let p = list
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Usage(format!("bad weight list '{list}': {e}")))?;
        return Ok(ChannelSpec::new(&res.rep, ChannelKind::Distribution(p))?);
    }
    Err(CliError::Usage(format!(
        "unknown distribution '{spec}' (uniform, fixed:<element>, weights:<p0>,...)"
    )))
}

fn message_rng(seed: u64) -> ChaCha8Rng {
    // a separate stream from the channel/measurement seeds
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn load_state(path: &Path) -> CliResult<(StateVector, InputDigest)> {
    let text = read_file(path)?;
    let dump: StateDump = serde_json::from_str(&text).map_err(Error::from)?;
    let state = StateVector::from_dump(&dump)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok((
        state,
        InputDigest {
            source: format!("file:{name}"),
            sha256: crate::source::sha256_hex(text.as_bytes()),
        },
    ))
}

fn roundtrip_cmd(a: &RoundtripArgs) -> CliResult<Report> {
    let res = resolve(&a.source)?;
    let seed = resolve_seed(a.seed)?;
    let tokens = res.tokens(a.r)?;
    let channel = parse_dist(&a.dist, &res)?;
    let (message, message_digest) = match &a.message {
        Some(path) => {
            let (state, digest) = load_state(path)?;
            (state, Some(digest))
        }
        None => {
            if a.m == 0 {
                return Err(CliError::Usage("--m must be at least 1".into()));
            }
            (StateVector::random(tokens.d(), a.m, &mut message_rng(seed.value))?, None)
        }
    };
    let (decoded, report) = roundtrip(&tokens, &message, &channel, seed.value)?;
    if let Some(path) = &a.dump_received {
        let chi = encode(&tokens, &message)?;
        let (received, _) = transmit(&channel, &chi, split_seed(seed.value).0)?;
        write_json(path, &received.dump())?;
    }
    if let Some(path) = &a.dump_state {
        write_json(path, &decoded.dump())?;
    }
    let mut result = to_value(&report)?;
    result["outcome_label"] = json!(res.label(report.outcome));
    result["applied_label"] = json!(res.label(report.applied_element));
    let config = json!({
        "m": message.qudits(),
        "r": a.r,
        "dist": a.dist,
        "channel": channel.kind(),
        "message": if message_digest.is_some() { "file" } else { "random" },
        "tol": a.tol,
    });
    let mut out = res.attach(Report::new("roundtrip", config, result)?).with_seed(seed);
    if let Some(d) = message_digest {
        out = out.input("message", d);
    }
    if report.fidelity < 1.0 - a.tol {
        return Err(CliError::Verification(format!(
            "round-trip fidelity {} below 1 - {}",
            report.fidelity, a.tol
        )));
    }
    Ok(out)
}

fn decode_cmd(a: &DecodeArgs) -> CliResult<Report> {
    let res = resolve(&a.source)?;
    let seed = resolve_seed(a.seed)?;
    let tokens = res.tokens(a.r)?;
    let (received, digest) = load_state(&a.state)?;
    let (probabilities, perp) = outcome_probabilities(&tokens, &received)?;
    let decoded = decode(&tokens, &received, seed.value)?;
    if let Some(path) = &a.dump_state {
        write_json(path, &decoded.message.dump())?;
    }
    let result = json!({
        "r": tokens.r(),
        "m": decoded.message.qudits(),
        "outcome": decoded.outcome,
        "outcome_label": res.label(decoded.outcome),
        "probability": decoded.probability,
        "probabilities": probabilities,
        "perp_probability": perp,
        "message": decoded.message.dump(),
    });
    Ok(res
        .attach(Report::new("decode", json!({ "r": a.r }), result)?)
        .input("state", digest)
        .with_seed(seed))
}

fn circuit_count(src: &RepSource, m: usize, path: Option<dfscodec::circuit::Path>) -> CliResult<Report> {
    let res = resolve(src)?;
    let mut report = gate_count_report(&res.rep, &res.table, m)?;
    if let Some(p) = path {
        report.paths.retain(|c| c.path == p);
        if report.paths.is_empty() {
            return Err(Error::BadGenerators(format!(
                "the {} path does not apply to this group",
                to_value(p)?.as_str().unwrap_or("requested")
            ))
            .into());
        }
    }
    let config = json!({ "m": m, "path": path });
    Ok(res.attach(Report::new("circuit count", config, report)?))
}

fn stage_counts(plan: &CircuitPlan) -> BTreeMap<&'static str, (usize, usize)> {
    let mut kinds = BTreeMap::new();
    for g in &plan.gates {
        let e = kinds.entry(g.name()).or_insert((0, 0));
        e.0 += 1;
        e.1 += g.cost;
    }
    kinds
}

#[allow(clippy::too_many_arguments)]
fn circuit_simulate(
    src: &RepSource,
    m: usize,
    path: dfscodec::circuit::Path,
    t_stage: dfscodec::circuit::TStage,
    verify: bool,
    trials: usize,
    seed: Option<u64>,
    tol: f64,
    export: Option<&Path>,
) -> CliResult<Report> {
    let res = resolve(src)?;
    let seed = resolve_seed(seed)?;
    let circ = build_encoding_circuit(&res.rep, &res.table, m, path, t_stage)?;
    let full = circ.full_plan()?;
    if let Some(p) = export {
        write_json(p, &full.export())?;
    }
    let mut rng = message_rng(seed.value);
    let mut fidelities = Vec::with_capacity(trials);
    for _ in 0..trials {
        let phi = StateVector::random(2, m, &mut rng)?;
        fidelities.push(circ.verify(&phi)?.0);
    }
    let min_fidelity = fidelities.iter().copied().fold(f64::INFINITY, f64::min);
    let kinds: BTreeMap<_, _> = stage_counts(&full)
        .into_iter()
        .map(|(k, (gates, cost))| (k, json!({ "gates": gates, "cost": cost })))
        .collect();
    let result = json!({
        "group_order": res.rep.group().order(),
        "r": circ.tokens.r(),
        "m": m,
        "layout": circ.layout(),
        "count": {
            "prep": circ.prep.total_count(),
            "w": circ.w.total_count(),
            "t": circ.t.total_count(),
            "total": full.total_count(),
        },
        "depth": {
            "w": circ.w.logical_depth(),
            "total": full.logical_depth(),
        },
        "gate_kinds": kinds,
        "trials": trials,
        "min_fidelity": if trials > 0 { Some(min_fidelity) } else { None },
    });
    let config = json!({
        "m": m,
        "path": path,
        "t_stage": t_stage,
        "verify": verify,
        "trials": trials,
        "tol": tol,
    });
    let report = res.attach(Report::new("circuit simulate", config, result)?).with_seed(seed);
    if verify && trials > 0 && min_fidelity < 1.0 - tol {
        return Err(CliError::Verification(format!(
            "circuit output fidelity {min_fidelity} below 1 - {tol}"
        )));
    }
    Ok(report)
}

fn parse_pair(spec: &str) -> CliResult<[C64; 2]> {
    let bad = || CliError::Usage(format!("expected re,im;re,im, got '{spec}'"));
    let parts: Vec<&str> = spec.split(';').collect();
    if parts.len() != 2 {
        return Err(bad());
    }
    let mut out = [C64::new(0.0, 0.0); 2];
    for (slot, part) in out.iter_mut().zip(parts) {
        let nums = part
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        match nums.as_slice() {
            [re, im] => *slot = C64::new(*re, *im),
            [re] => *slot = C64::new(*re, 0.0),
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

fn demo_su2(trials: usize, seed: Option<u64>, c: &str, d: &str) -> CliResult<Report> {
    let seed = resolve_seed(seed)?;
    let enc = LogicalEncoding::new(parse_pair(c)?, parse_pair(d)?)?;
    let report = su2_demo_with(trials, seed.value, &enc)?;
    let config = json!({ "trials": trials, "c": c, "d": d });
    Ok(Report::new("demo su2", config, report)?.with_seed(seed))
}
