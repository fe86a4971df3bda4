"""Command-line surface wiring the pipeline end to end.

Subcommands: convert, refine, report, kg, query, serve. Human summaries go
to stdout; diagnostics are JSON lines on stderr. Exit codes: 0 success,
1 user error (bad flags, unreadable or malformed inputs), 2 internal error.
"""
import argparse
import json
import sys
from pathlib import Path

from .core import SceneBody, SceneWorld
from .diagnostics import Diagnostics
from .errors import SceneBridgeError
from .dynamics import RefineOptions, refine_dynamics
from .formats import (
    ImportOptions,
    export_mjcf,
    export_urdf,
    import_mjcf,
    import_procthor,
    import_sdf,
    import_urdf,
)
from .kg import (
    build_kg,
    evaluate,
    export_triples,
    kg_from_triples,
    load_cq_pattern,
    load_ontology,
    parse_ntriples,
    parse_query,
)
from .semantics import (
    FixtureClient,
    HttpClient,
    add_label,
    annotate_stage,
    link_to_iri,
    load_lexicon,
)
from .usda import (
    extract_semantic_layer,
    load_scene,
    merge_semantic_layer,
    save_scene,
    stage_to_world,
    world_to_stage,
)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2

_IMPORTERS = {
    "urdf": import_urdf,
    "mjcf": import_mjcf,
    "sdf": import_sdf,
    "procthor": import_procthor,
}

_SUFFIX_FORMATS = {
    ".urdf": "urdf",
    ".mjcf": "mjcf",
    ".xml": "mjcf",
    ".sdf": "sdf",
    ".world": "sdf",
    ".json": "procthor",
    ".usda": "usda",
}


class _ArgumentError(SceneBridgeError):
    """Raised instead of argparse's SystemExit so bad flags exit with 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(f"{self.prog}: {message}")


# -- config file -------------------------------------------------------------

_CONFIG_KEYS = {
    "inputs": "list",
    "format": "str",
    "output": "str",
    "to": "str",
    "refine": "bool",
    "density": "float",
    "consolidate_fixed": "bool",
    "mesh_root": "str",
    "lexicon": "str",
    "ontology": "str",
    "fixtures": "str",
    "endpoint": "str",
    "accept": "bool",
    "pattern": "str",
    "cq": "int",
    "tool": "str",
    "json": "bool",
    "port": "int",
    "ui_dir": "str",
    "write_back": "bool",
}

_BOOL_WORDS = {"true": True, "yes": True, "1": True,
               "false": False, "no": False, "0": False}


def parse_config(text: str, origin: str = "<config>") -> dict:
    """Key = value lines mirroring the flag surface; # starts a comment."""
    values = {}
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise SceneBridgeError(f"{origin}:{number}: expected 'key = value'")
        kind = _CONFIG_KEYS.get(key)
        if kind is None:
            raise SceneBridgeError(f"{origin}:{number}: unknown config key {key!r}")
        try:
            if kind == "bool":
                values[key] = _BOOL_WORDS[value.lower()]
            elif kind == "int":
                values[key] = int(value)
            elif kind == "float":
                values[key] = float(value)
            elif kind == "list":
                values[key] = value.split()
            else:
                values[key] = value
        except (KeyError, ValueError):
            raise SceneBridgeError(
                f"{origin}:{number}: bad {kind} value {value!r} for {key!r}"
            ) from None
    return values


def _apply_config(args: argparse.Namespace, config: dict):
    for key, value in config.items():
        if hasattr(args, key) and getattr(args, key) in (None, []):
            setattr(args, key, value)


# -- shared helpers -----------------------------------------------------------

def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SceneBridgeError(f"cannot read {str(path)!r}: {exc.strerror}") from exc


def _infer_format(path, explicit: str | None) -> str:
    if explicit:
        if explicit not in (*_IMPORTERS, "usda"):
            raise SceneBridgeError(f"unknown input format {explicit!r}")
        return explicit
    fmt = _SUFFIX_FORMATS.get(Path(path).suffix.lower())
    if fmt is None:
        raise SceneBridgeError(
            f"cannot infer format of {str(path)!r}; pass --format"
        )
    return fmt


def _load_input(path, fmt: str, options: ImportOptions, diags: Diagnostics) -> SceneWorld:
    if fmt == "usda":
        return stage_to_world(load_scene(path))
    return _IMPORTERS[fmt](_read_text(path), options, diags)


def _identifier_stem(path) -> str:
    stem = "".join(
        ch if ch.isalnum() or ch == "_" else "_" for ch in Path(path).stem
    )
    if not stem or stem[0].isdigit():
        stem = "_" + stem
    return stem


def _graft(merged: SceneWorld, stem: str, src: SceneBody, parent, renames: dict):
    name = src.name
    if name in merged.name_index:
        name = merged.unique_name(f"{stem}_{name}")
    renames[src.name] = name
    children, src.children = src.children, []
    geometries, src.geometries = src.geometries, []
    joints, src.joints = src.joints, []
    src.name = name
    merged.add_body(src, parent)
    for geom in geometries:
        if geom.name in merged.name_index:
            geom.name = merged.unique_name(f"{stem}_{geom.name}")
        merged.add_geometry(geom, src)
    deferred = [(src, joint) for joint in joints]
    for child in children:
        deferred.extend(_graft(merged, stem, child, src, renames))
    return deferred


def merge_worlds(parts: list) -> SceneWorld:
    """Combine imported worlds under one group body per source file."""
    merged = SceneWorld()
    for stem, world in parts:
        group = SceneBody(merged.unique_name(stem))
        merged.add_body(group)
        for name, kind, value in world.world_properties.items():
            group.properties.set(name, value, kind)
        renames: dict = {}
        deferred = []
        for body in world.root_bodies:
            deferred.extend(_graft(merged, group.name, body, group, renames))
        for owner, joint in deferred:
            joint.parent_body = renames.get(joint.parent_body, joint.parent_body)
            joint.child_body = renames.get(joint.child_body, joint.child_body)
            if joint.name in merged.name_index:
                joint.name = merged.unique_name(f"{group.name}_{joint.name}")
            merged.add_joint(joint, owner)
    return merged


def _counts(world: SceneWorld) -> str:
    bodies = sum(1 for _ in world.iter_bodies())
    joints = sum(1 for _ in world.iter_joints())
    geoms = sum(1 for _ in world.iter_geometries())
    return f"{bodies} bodies, {joints} joints, {geoms} geometries"


# -- subcommands ---------------------------------------------------------------

def cmd_convert(args, diags: Diagnostics) -> int:
    if not args.inputs:
        raise SceneBridgeError("convert needs at least one input file")
    if args.output is None:
        raise SceneBridgeError("convert needs --output")
    options = ImportOptions(
        mesh_root=args.mesh_root,
        fix_missing_inertials=bool(args.refine),
        default_density=args.density if args.density is not None else 1000.0,
    )
    parts = []
    for path in args.inputs:
        fmt = _infer_format(path, args.format)
        parts.append((_identifier_stem(path), _load_input(path, fmt, options, diags)))
    world = parts[0][1] if len(parts) == 1 else merge_worlds(parts)
    if args.refine:
        density = args.density if args.density is not None else 1000.0
        refine_dynamics(world, RefineOptions(default_density=density), diags)
    target = args.to or _SUFFIX_FORMATS.get(Path(args.output).suffix.lower(), "usda")
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if target == "usda":
        written = save_scene(world_to_stage(world), out)
        print(f"{_counts(world)} -> {', '.join(str(p) for p in written)}")
    elif target == "urdf":
        out.write_text(export_urdf(world, diagnostics=diags), encoding="utf-8")
        print(f"{_counts(world)} -> {out}")
    elif target == "mjcf":
        out.write_text(export_mjcf(world, diagnostics=diags), encoding="utf-8")
        print(f"{_counts(world)} -> {out}")
    else:
        raise SceneBridgeError(f"unsupported conversion target {target!r}")
    return EXIT_OK


def cmd_refine(args, diags: Diagnostics) -> int:
    if not args.inputs:
        raise SceneBridgeError("refine needs an input stage")
    if len(args.inputs) > 1:
        raise SceneBridgeError("refine takes exactly one stage")
    source = args.inputs[0]
    stage = load_scene(source)
    clean, overlay = extract_semantic_layer(stage)
    world = stage_to_world(clean)
    options = RefineOptions(
        default_density=args.density if args.density is not None else 1000.0,
        consolidate_fixed_chains=bool(args.consolidate_fixed),
    )
    report = refine_dynamics(world, options, diags)
    refined = merge_semantic_layer(world_to_stage(world), overlay)
    written = save_scene(refined, args.output or source)
    print(
        f"filled {len(report.filled)}, repaired {len(report.repaired)}, "
        f"consolidated {len(report.consolidated)} -> "
        f"{', '.join(str(p) for p in written)}"
    )
    return EXIT_OK


def cmd_report(args, diags: Diagnostics) -> int:
    if not args.inputs:
        raise SceneBridgeError("report needs an input stage")
    if len(args.inputs) > 1:
        raise SceneBridgeError("report takes exactly one stage")
    if args.fixtures and args.endpoint:
        raise SceneBridgeError("--fixtures and --endpoint are mutually exclusive")
    source = args.inputs[0]
    stage = load_scene(source)
    lexicon = load_lexicon(args.lexicon)
    client = None
    if args.fixtures:
        client = FixtureClient(args.fixtures)
    elif args.endpoint:
        client = HttpClient(args.endpoint)
    reports = annotate_stage(stage, lexicon, client)
    accepted = 0
    if args.accept:
        for report in reports:
            if report.candidates:
                top = report.candidates[0]
                add_label(stage, report.subject, link_to_iri(*top.links[0]))
                accepted += 1
    written = save_scene(stage, args.output or source)
    with_candidates = sum(1 for r in reports if r.candidates)
    line = f"{len(reports)} bodies reported, {with_candidates} with candidates"
    if args.accept:
        line += f", {accepted} labels accepted"
    print(line + f" -> {', '.join(str(p) for p in written)}")
    return EXIT_OK


def cmd_kg(args, diags: Diagnostics) -> int:
    if not args.inputs:
        raise SceneBridgeError("kg needs an input stage")
    if len(args.inputs) > 1:
        raise SceneBridgeError("kg takes exactly one stage")
    if args.ontology is None:
        raise SceneBridgeError("kg needs --ontology")
    stage = load_scene(args.inputs[0])
    graph = build_kg(stage, load_ontology(args.ontology), diags)
    text = export_triples(graph)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(
            f"{len(graph.instances())} instances, {len(graph.triples())} triples "
            f"-> {args.output}"
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_query(args, diags: Diagnostics) -> int:
    if not args.inputs:
        raise SceneBridgeError("query needs an exported triples file")
    if len(args.inputs) > 1:
        raise SceneBridgeError("query takes exactly one triples file")
    if (args.cq is None) == (args.pattern is None):
        raise SceneBridgeError("pass exactly one of --cq N or --pattern FILE")
    graph = kg_from_triples(parse_ntriples(_read_text(args.inputs[0])))
    if args.cq is not None:
        text = load_cq_pattern(args.cq, args.tool)
        pattern = parse_query(text, origin=f"cq{args.cq}")
    else:
        if args.tool is not None:
            raise SceneBridgeError("--tool applies only to --cq patterns")
        pattern = parse_query(_read_text(args.pattern), origin=str(args.pattern))
    rows = evaluate(pattern, graph)
    if args.json:
        print(json.dumps({"head": list(pattern.head), "results": rows}, indent=2, sort_keys=True))
    else:
        print("\t".join(f"?{name}" for name in pattern.head))
        for row in rows:
            print("\t".join(row[name] for name in pattern.head))
    return EXIT_OK


def cmd_serve(args, diags: Diagnostics) -> int:
    if not args.inputs:
        raise SceneBridgeError("serve needs a stage file")
    if len(args.inputs) > 1:
        raise SceneBridgeError("serve takes exactly one stage file")
    from .server import serve_stage

    return serve_stage(
        args.inputs[0],
        port=args.port if args.port is not None else 8000,
        ui_dir=args.ui_dir,
        write_back=bool(args.write_back),
    )


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scenebridge", description=__doc__)
    parser.add_argument("--config", help="key = value defaults file")
    commands = parser.add_subparsers(dest="command")

    def sub(name, helptext, **extra_flags):
        p = commands.add_parser(name, help=helptext)
        p.add_argument("inputs", nargs="*", default=[])
        p.add_argument("-o", "--output", default=None)
        return p

    p = sub("convert", "import scene files and emit one USDA stage (or URDF/MJCF)")
    p.add_argument("--format", default=None, help="force input format for all inputs")
    p.add_argument("--to", default=None, choices=("usda", "urdf", "mjcf"))
    p.add_argument("--refine", action="store_true", default=None)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--mesh-root", dest="mesh_root", default=None)

    p = sub("refine", "fill and repair rigid-body dynamics on a stage")
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--consolidate-fixed", dest="consolidate_fixed",
                   action="store_true", default=None)

    p = sub("report", "attach semantic candidate reports to body prims")
    p.add_argument("--lexicon", default=None)
    p.add_argument("--fixtures", default=None, help="recorded client responses")
    p.add_argument("--endpoint", default=None, help="live text-to-triples URL")
    p.add_argument("--accept", action="store_true", default=None,
                   help="accept the top candidate of every report as a label")

    p = sub("kg", "compile a tagged stage into an N-Triples knowledge graph")
    p.add_argument("--ontology", default=None)

    p = sub("query", "answer a packaged or custom pattern over exported triples")
    p.add_argument("--cq", type=int, default=None)
    p.add_argument("--tool", default=None, help="tool class IRI for --cq 3")
    p.add_argument("--pattern", default=None, help="custom pattern file")
    p.add_argument("--json", action="store_true", default=None)

    p = sub("serve", "serve the stage (and optional UI assets) over HTTP")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--ui-dir", dest="ui_dir", default=None)
    p.add_argument("--write-back", dest="write_back", action="store_true",
                   default=None, help="enable PUT /semantic-layer")

    return parser


_COMMANDS = {
    "convert": cmd_convert,
    "refine": cmd_refine,
    "report": cmd_report,
    "kg": cmd_kg,
    "query": cmd_query,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    diags = Diagnostics()
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise _ArgumentError("scenebridge: pick a command (see --help)")
        if args.config:
            _apply_config(args, parse_config(_read_text(args.config), args.config))
        result = _COMMANDS[args.command](args, diags)
    except SceneBridgeError as exc:
        diags.error("cli", str(exc))
        diags.write_json_lines(sys.stderr)
        return EXIT_USER_ERROR
    except KeyboardInterrupt:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        diags.error("internal", f"{type(exc).__name__}: {exc}")
        diags.write_json_lines(sys.stderr)
        return EXIT_INTERNAL_ERROR
    diags.write_json_lines(sys.stderr)
    return result
