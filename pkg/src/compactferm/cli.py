"""``compactferm`` command line: antisym-demo, evolve, spectrum, verify.

Settings come from built-in defaults, then an optional INI file (``--config``),
then command-line flags. Every CSV starts with ``#`` metadata lines carrying the
package version, the seed and a hash of the resolved settings.
"""
from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .experiments import EVOLVE_DEFAULTS, SPECTRUM_DEFAULTS, EvolutionSetup, antisym_histograms
from .lattice import Discretization, JelliumParams
from .spectral import find_peaks, fourier_spectrum, peaks_csv, series_csv, spectrum_csv

EXIT_OK, EXIT_CONFIG, EXIT_PROPERTY = 0, 1, 2


class ConfigError(ValueError):
    pass


# key -> (config section, parser)
_KEYS = {
    "discretization": ("physics", str),
    "N_e": ("physics", int),
    "r_s": ("physics", float),
    "E_0": ("physics", float),
    "dt": ("evolution", float),
    "n_points": ("evolution", int),
    "n_trotter": ("evolution", int),
    "shots": ("sampling", int),
    "seed": ("sampling", int),
    "mode": ("sampling", str),
    "threshold": ("spectrum", float),
    "pad_to": ("spectrum", int),
    "output_dir": ("output", str),
}
_CONFIG_ALIASES = {("output", "dir"): "output_dir"}


def _base_defaults() -> dict:
    p = JelliumParams()
    return dict(discretization="A", N_e=p.N_e, r_s=p.r_s, E_0=p.E_0, dt=None, n_points=None,
                n_trotter=1, shots=1000, seed=12345, mode="trotter", threshold=0.05,
                pad_to=None, output_dir=".")


def read_config(path: str | Path) -> dict:
    """Flat dict of recognised keys from an INI file; unknown sections/keys are errors."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            name = _CONFIG_ALIASES.get((section, key), key)
            if name not in _KEYS or _KEYS[name][0] != section:
                raise ConfigError(f"unknown config key [{section}] {key}")
            conv = _KEYS[name][1]
            if raw.strip().lower() in ("", "none"):
                out[name] = None
                continue
            try:
                out[name] = conv(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
    return out


def resolve_settings(command: str, config: dict, flags: dict) -> dict:
    s = _base_defaults()
    s.update(config)
    s.update({k: v for k, v in flags.items() if v is not None})
    try:
        d = Discretization(str(s["discretization"]).upper())
    except ValueError:
        raise ConfigError(f"invalid discretization {s['discretization']!r} (expected A or B)") from None
    s["discretization"] = d.value
    table = SPECTRUM_DEFAULTS if command == "spectrum" else EVOLVE_DEFAULTS
    n_def, dt_def = table[d]
    if s["n_points"] is None:
        s["n_points"] = n_def
    if s["dt"] is None:
        s["dt"] = dt_def
    if s["mode"] not in ("trotter", "oracle"):
        raise ConfigError(f"mode must be 'trotter' or 'oracle', got {s['mode']!r}")
    checks = [
        (s["N_e"] >= 1, "N_e must be >= 1"),
        (s["r_s"] > 0, "r_s must be > 0"),
        (s["E_0"] > 0, "E_0 must be > 0"),
        (s["dt"] > 0, "dt must be > 0"),
        (s["n_points"] >= 2, "n_points must be >= 2"),
        (s["n_trotter"] >= 1, "n_trotter must be >= 1"),
        (s["shots"] >= 0, "shots must be >= 0"),
        (0 < s["threshold"] < 1, "threshold must be in (0, 1)"),
        (s["pad_to"] is None or s["pad_to"] >= s["n_points"], "pad_to must be >= n_points"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ConfigError(msg)
    return s


def settings_hash(settings: dict) -> str:
    blob = json.dumps({k: v for k, v in settings.items() if k != "output_dir"}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def metadata_header(command: str, settings: dict) -> str:
    lines = [
        f"compactferm {__version__} {command}",
        f"config_sha256={settings_hash(settings)}",
        f"seed={settings['seed']}",
        "settings=" + json.dumps({k: v for k, v in settings.items() if k != "output_dir"}, sort_keys=True),
    ]
    return "".join(f"# {line}\n" for line in lines)


def _write(settings: dict, command: str, name: str, body: str) -> Path:
    out = Path(settings["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(metadata_header(command, settings) + body, encoding="utf-8")
    return path


def _setup(s: dict) -> EvolutionSetup:
    return EvolutionSetup(s["discretization"], JelliumParams(s["N_e"], s["r_s"], s["E_0"]))


def _series(setup: EvolutionSetup, s: dict):
    oracle = setup.oracle_series(s["dt"], s["n_points"])
    if s["mode"] == "oracle":
        return oracle, oracle
    return setup.trotter_series(s["dt"], s["n_points"], s["n_trotter"], s["shots"], s["seed"]), oracle


def cmd_antisym_demo(s: dict) -> int:
    shots = s["shots"]
    result = antisym_histograms(shots=shots or None, seed=s["seed"])
    for name, entry in result.items():
        exact = entry["exact"]
        hist = entry.get("sampled", exact)
        path = _write(s, "antisym-demo", f"antisym_{name}.csv", hist.to_csv(exact.probabilities))
        print(f"{name}: {path}")
        for k, p in sorted(exact.probabilities.items()):
            c = "" if hist.counts is None else f"  count {hist.counts.get(k, 0)}"
            print(f"  {k}  exact {p:.4f}{c}")
    return EXIT_OK


def cmd_evolve(s: dict) -> int:
    setup = _setup(s)
    series, oracle = _series(setup, s)
    d = s["discretization"]
    path = _write(s, "evolve", f"evolve_{d}.csv", series_csv(series, {"oracle_probability": oracle.values}))
    dev = float(abs(series.values - oracle.values).max())
    print(f"{path}  ({len(series)} points, max |P - P_oracle| = {dev:.4f})")
    return EXIT_OK


def cmd_spectrum(s: dict) -> int:
    setup = _setup(s)
    series, _ = _series(setup, s)
    spec = fourier_spectrum(series, s["pad_to"])
    peaks = find_peaks(spec, s["threshold"])
    tag = f"{s['discretization']}" + ("_oracle" if s["mode"] == "oracle" else "")
    _write(s, "spectrum", f"series_{tag}.csv", series_csv(series))
    _write(s, "spectrum", f"spectrum_{tag}.csv", spectrum_csv(spec))
    path = _write(s, "spectrum", f"peaks_{tag}.csv", peaks_csv(peaks))
    print(f"{path}  (bin width {spec.spacing:.4f} eV)")
    for p in peaks:
        print(f"  {p.frequency:.3f} +- {p.error:.3f} eV   period {p.period:.3f} +- {p.period_error:.3f} eV^-1")
    return EXIT_OK


def cmd_verify(s: dict) -> int:
    from .verify import run_all

    results = run_all()
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_PROPERTY


COMMANDS = {
    "antisym-demo": cmd_antisym_demo,
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI file with [physics] [evolution] [sampling] [spectrum] [output]")
    common.add_argument("--discretization", "-d")
    common.add_argument("--N-e", dest="N_e", type=int)
    common.add_argument("--r-s", dest="r_s", type=float)
    common.add_argument("--E-0", dest="E_0", type=float)
    common.add_argument("--dt", type=float, help="sampling step in eV^-1")
    common.add_argument("--n-points", dest="n_points", type=int)
    common.add_argument("--n-trotter", dest="n_trotter", type=int, help="Trotter substeps per sample")
    common.add_argument("--shots", type=int, help="0 records exact marginals")
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=["trotter", "oracle"])
    common.add_argument("--threshold", type=float, help="peak threshold, fraction of the largest")
    common.add_argument("--pad-to", dest="pad_to", type=int)
    common.add_argument("--output-dir", "-o", dest="output_dir")

    parser = _Parser(prog="compactferm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"compactferm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "antisym-demo": "antisymmetrize the scalar two-register demo state and write histograms",
        "evolve": "time series of P(p0 in register 1) with the exact reference column",
        "spectrum": "DFT spectrum and peak list of the time series",
        "verify": "run the property checks; exit 2 if any fails",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    cfg_path = args.pop("config")
    try:
        config = read_config(cfg_path) if cfg_path else {}
        settings = resolve_settings(command, config, args)
    except ConfigError as exc:
        print(f"compactferm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return COMMANDS[command](settings)


if __name__ == "__main__":
    sys.exit(main())
