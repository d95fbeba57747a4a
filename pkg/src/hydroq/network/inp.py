"""Parser and writer for a subset of the EPANET INP text format.

Supported sections: [JUNCTIONS], [RESERVOIRS], [PIPES], [DEMANDS],
[OPTIONS], plus inert ones ([TITLE], [COORDINATES], [END], ...). Pumps,
valves, tanks and patterns are outside the supported subset and abort the
parse. Only SI flow units are accepted; everything is converted to
m / m^3/s internally (diameters appear in mm in the file, per convention).
"""

from __future__ import annotations

from .model import Junction, Network, NetworkError, Pipe, Reservoir

# m^3/s per one unit of the given flow unit
FLOW_UNIT_FACTORS = {
    "LPS": 1e-3,
    "LPM": 1e-3 / 60.0,
    "MLD": 1e6 * 1e-3 / 86400.0,
    "CMH": 1.0 / 3600.0,
    "CMD": 1.0 / 86400.0,
}
DEFAULT_UNITS = "LPS"

UNSUPPORTED_SECTIONS = {
    "PUMPS", "VALVES", "TANKS", "PATTERNS", "CURVES", "CONTROLS",
    "RULES", "STATUS", "EMITTERS", "QUALITY", "SOURCES", "MIXING",
    "REACTIONS",
}
IGNORED_SECTIONS = {
    "TITLE", "COORDINATES", "VERTICES", "LABELS", "TAGS", "BACKDROP",
    "TIMES", "REPORT", "ENERGY", "END",
}
PARSED_SECTIONS = {"JUNCTIONS", "RESERVOIRS", "PIPES", "DEMANDS", "OPTIONS"}


class InpParseError(ValueError):
    """Parse failure; carries the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


def _tokens(line: str) -> list[str]:
    return line.split(";", 1)[0].split()


def _number(token: str, what: str, lineno: int, column: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise InpParseError(f"expected a number for {what}, got {token!r}", lineno, column) from None


def parse_inp(text: str, name: str = "network") -> Network:
    """Parse INP text into a validated Network (SI units)."""
    junctions: list[tuple[str, float, float]] = []  # id, elevation, demand (flow units)
    reservoirs: list[tuple[str, float]] = []
    pipes: list[tuple[str, str, str, float, float, float]] = []
    demand_overrides: dict[str, float] = {}
    units = None
    section = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(";"):
            continue
        if stripped.startswith("["):
            if "]" not in stripped:
                raise InpParseError("unterminated section header", lineno, 1)
            section = stripped[1 : stripped.index("]")].strip().upper()
            if section in UNSUPPORTED_SECTIONS:
                raise InpParseError(f"section [{section}] is not supported", lineno, 1)
            if section not in PARSED_SECTIONS and section not in IGNORED_SECTIONS:
                raise InpParseError(f"unknown section [{section}]", lineno, 1)
            continue
        if section is None:
            raise InpParseError("content before any section header", lineno, 1)
        if section in IGNORED_SECTIONS:
            continue

        toks = _tokens(stripped)
        if not toks:
            continue
        col = raw.index(toks[0]) + 1

        if section == "JUNCTIONS":
            if len(toks) < 2:
                raise InpParseError("junction line needs: id elevation [demand]", lineno, col)
            elev = _number(toks[1], "elevation", lineno, col)
            demand = _number(toks[2], "demand", lineno, col) if len(toks) >= 3 else 0.0
            junctions.append((toks[0], elev, demand))
        elif section == "RESERVOIRS":
            if len(toks) < 2:
                raise InpParseError("reservoir line needs: id head", lineno, col)
            reservoirs.append((toks[0], _number(toks[1], "head", lineno, col)))
        elif section == "PIPES":
            if len(toks) < 6:
                raise InpParseError(
                    "pipe line needs: id node1 node2 length diameter roughness", lineno, col
                )
            length = _number(toks[3], "length", lineno, col)
            diameter = _number(toks[4], "diameter", lineno, col)
            roughness = _number(toks[5], "roughness", lineno, col)
            pipes.append((toks[0], toks[1], toks[2], length, diameter, roughness))
        elif section == "DEMANDS":
            if len(toks) < 2:
                raise InpParseError("demand line needs: junction demand", lineno, col)
            value = _number(toks[1], "demand", lineno, col)
            # multiple categories for one junction accumulate
            demand_overrides[toks[0]] = demand_overrides.get(toks[0], 0.0) + value
        elif section == "OPTIONS":
            key = toks[0].upper()
            if key == "UNITS":
                if len(toks) < 2:
                    raise InpParseError("UNITS option needs a value", lineno, col)
                units = toks[1].upper()
                if units not in FLOW_UNIT_FACTORS:
                    raise InpParseError(f"unsupported flow units {units!r}", lineno, col)
            elif key == "HEADLOSS":
                if len(toks) < 2 or toks[1].upper() != "H-W":
                    raise InpParseError("only H-W headloss is supported", lineno, col)
            # other options are irrelevant to the supported subset

    if not reservoirs:
        raise InpParseError("no reservoir section")

    flow_factor = FLOW_UNIT_FACTORS[units or DEFAULT_UNITS]
    junction_objs = []
    junction_ids = set()
    for jid, elev, demand in junctions:
        junction_ids.add(jid)
        if jid in demand_overrides:
            demand = demand_overrides[jid]
        junction_objs.append(Junction(id=jid, elevation=elev, base_demand=demand * flow_factor))
    for jid in demand_overrides:
        if jid not in junction_ids:
            raise InpParseError(f"[DEMANDS] references unknown junction {jid!r}")

    try:
        return Network(
            junctions=tuple(junction_objs),
            reservoirs=tuple(Reservoir(id=r, head=h) for r, h in reservoirs),
            pipes=tuple(
                Pipe(id=pid, start_node=a, end_node=b, length=ln,
                     diameter=dm / 1000.0, roughness=rg)
                for pid, a, b, ln, dm, rg in pipes
            ),
            name=name,
        )
    except NetworkError as exc:
        raise InpParseError(str(exc)) from exc


def serialize_inp(net: Network) -> str:
    """Write a Network back out in the supported INP subset (LPS units)."""
    f = FLOW_UNIT_FACTORS["LPS"]
    lines = ["[JUNCTIONS]", ";id  elevation_m  demand_LPS"]
    for j in net.junctions:
        lines.append(f"{j.id}  {j.elevation:.12g}  {j.base_demand / f:.12g}")
    lines.append("")
    lines.append("[RESERVOIRS]")
    lines.append(";id  head_m")
    for r in net.reservoirs:
        lines.append(f"{r.id}  {r.head:.12g}")
    lines.append("")
    lines.append("[PIPES]")
    lines.append(";id  node1  node2  length_m  diameter_mm  roughness")
    for p in net.pipes:
        lines.append(
            f"{p.id}  {p.start_node}  {p.end_node}  {p.length:.12g}  "
            f"{p.diameter * 1000.0:.12g}  {p.roughness:.12g}"
        )
    lines.append("")
    lines.append("[OPTIONS]")
    lines.append("UNITS LPS")
    lines.append("HEADLOSS H-W")
    lines.append("")
    lines.append("[END]")
    return "\n".join(lines) + "\n"
