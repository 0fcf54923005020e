"""Input documents and reports.

Input documents are JSON objects {"version", "kind", "payload"}; rationals
are integers or "p/q" strings, matrices are row-major arrays and polynomials
are coefficient arrays indexed by degree. Reports carry every exact value as
a rational string so that parsing an emitted report gives it back unchanged.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from dhlab.config import DEFAULT_EPSILON_BOUND, SCENARIO_KINDS, SCHEMA_VERSION, SIX_MANIFOLD_DIMENSION
from dhlab.construct import CounterexampleInput
from dhlab.dhcore import DensityAnalyzer, DensityPiece, DHProfile, ReducedComponentData
from dhlab.errors import InputError, ParseError
from dhlab.exactlin import ClassVector, IntegerSymmetricForm, to_rational
from dhlab.lefschetz import FourManifoldRing
from dhlab.polycert import Interval, SignVerdict, UnivariatePolynomial
from dhlab.wallcross import CriticalLevelData, CriticalStratumData, MomentProfileSpec, WallCrossingEngine

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InputDocument:
    version: str
    kind: str
    payload: Dict[str, Any]
    source: str = "<input>"


@dataclass(frozen=True)
class HLRequest:
    ring: FourManifoldRing
    omega0: ClassVector
    beta2: ClassVector
    beta4: Fraction
    epsilon: Optional[Fraction]
    bound: int
    counterexample: bool


def parse_document(text: str, source: str = "<input>") -> InputDocument:
    """Parse and validate the envelope of an input document.

    Args:
        text: Document text
        source: Name used in log messages

    Returns:
        InputDocument with the raw payload

    Raises:
        ParseError: On invalid JSON, a missing or unknown version, or an unknown kind
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno) from e
    if not isinstance(data, dict):
        raise ParseError("document must be a JSON object")
    if "version" not in data:
        raise ParseError("schema version is mandatory", field="version")
    version = str(data["version"])
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema version {version!r}, expected {SCHEMA_VERSION!r}", field="version")
    kind = data.get("kind")
    if kind not in SCENARIO_KINDS:
        raise ParseError(f"unknown kind {kind!r}, expected one of {', '.join(SCENARIO_KINDS)}", field="kind")
    payload = data.get("payload")
    if not isinstance(payload, dict):
        raise ParseError("payload must be an object", field="payload")
    logger.debug(f"Parsed {kind} document from {source}")
    return InputDocument(version, kind, payload, source)


def load_document(path: Union[str, Path]) -> InputDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not valid UTF-8: {e.reason} at byte {e.start}") from e
    return parse_document(text, source=str(path))


def expect_kind(document: InputDocument, *kinds: str) -> None:
    if document.kind not in kinds:
        raise ParseError(f"expected a {' or '.join(kinds)} document, got {document.kind}", field="kind")


# Field readers


def _get(mapping: Dict[str, Any], key: str, path: str) -> Any:
    if not isinstance(mapping, dict):
        raise ParseError("expected an object", field=path)
    if key not in mapping:
        raise ParseError("missing field", field=f"{path}.{key}")
    return mapping[key]


def read_rational(value: Any, path: str) -> Fraction:
    try:
        return to_rational(value)
    except InputError as e:
        raise ParseError(str(e), field=path) from e


def read_integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", field=path)
    return value


def read_vector(value: Any, path: str) -> ClassVector:
    if not isinstance(value, list):
        raise ParseError("expected an array", field=path)
    return ClassVector(tuple(read_rational(v, f"{path}[{i}]") for i, v in enumerate(value)))


def read_matrix(value: Any, path: str) -> List[List[Fraction]]:
    if not isinstance(value, list):
        raise ParseError("expected an array of rows", field=path)
    return [list(read_vector(row, f"{path}[{i}]")) for i, row in enumerate(value)]


def read_form(value: Any, path: str) -> IntegerSymmetricForm:
    if not isinstance(value, list) or not value:
        raise ParseError("expected a non-empty array of rows", field=path)
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise ParseError("expected an array", field=f"{path}[{i}]")
        if len(row) != len(value):
            raise ParseError(f"row has {len(row)} entries, matrix is not square ({len(value)} rows)", field=f"{path}[{i}]")
    rows = [[read_integer(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(value)]
    try:
        return IntegerSymmetricForm.from_rows(rows)
    except InputError as e:
        raise ParseError(str(e), field=path) from e


def read_polynomial(value: Any, path: str) -> UnivariatePolynomial:
    return UnivariatePolynomial(tuple(read_vector(value, path)))


def read_interval(value: Any, path: str) -> Interval:
    if not isinstance(value, list) or len(value) != 2:
        raise ParseError("expected [lower, upper] with null for an infinite end", field=path)
    lower, upper = (None if v is None else read_rational(v, f"{path}[{i}]") for i, v in enumerate(value))
    try:
        return Interval(lower, upper)
    except InputError as e:
        raise ParseError(str(e), field=path) from e


# Payload readers


def read_form_payload(document: InputDocument) -> IntegerSymmetricForm:
    expect_kind(document, "form", "counterexample")
    return read_form(_get(document.payload, "form", "payload"), "payload.form")


def read_counterexample(document: InputDocument) -> CounterexampleInput:
    expect_kind(document, "counterexample")
    payload = document.payload
    form = read_form(_get(payload, "form", "payload"), "payload.form")
    omega0 = read_vector(_get(payload, "omega0", "payload"), "payload.omega0")
    return CounterexampleInput(form, omega0, str(payload.get("name", Path(document.source).stem)))


def read_component(value: Any, interval: Interval, path: str) -> ReducedComponentData:
    if not isinstance(value, dict):
        raise ParseError("expected an object", field=path)
    if "lambda" in value:
        lambdas = list(read_vector(value["lambda"], f"{path}.lambda"))
        if not lambdas:
            raise ParseError("lambda must be non-empty", field=f"{path}.lambda")
        r = read_rational(_get(value, "r", path), f"{path}.r")
        return ReducedComponentData.from_lambda(lambdas, r, interval)
    form = read_form(_get(value, "form", path), f"{path}.form")
    omega = read_vector(_get(value, "omega", path), f"{path}.omega")
    chern = read_vector(_get(value, "chern", path), f"{path}.chern")
    return ReducedComponentData(form, omega, chern, interval)


def read_dh_profile(document: InputDocument, analyzer: DensityAnalyzer) -> DHProfile:
    """Pieces are given either as quotient data ("component") or directly ("polynomial")."""
    expect_kind(document, "dh_profile")
    pieces = _get(document.payload, "pieces", "payload")
    if not isinstance(pieces, list) or not pieces:
        raise ParseError("expected a non-empty array of pieces", field="payload.pieces")
    result = []
    for i, piece in enumerate(pieces):
        path = f"payload.pieces[{i}]"
        interval = read_interval(_get(piece, "interval", path), f"{path}.interval")
        if "polynomial" in piece:
            polynomial = read_polynomial(piece["polynomial"], f"{path}.polynomial")
        else:
            component = read_component(_get(piece, "component", path), interval, f"{path}.component")
            polynomial = analyzer.dh_density(component)
        result.append(DensityPiece(interval, polynomial))
    return DHProfile(tuple(result))


def read_stratum(value: Any, ambient: int, path: str) -> CriticalStratumData:
    hessian = _get(value, "hessian", path)
    if not isinstance(hessian, list) or len(hessian) != 2:
        raise ParseError("expected [2f, 2b]", field=f"{path}.hessian")
    return CriticalStratumData(
        label=str(_get(value, "label", path)),
        dimension=read_integer(_get(value, "dimension", path), f"{path}.dimension"),
        two_f=read_integer(hessian[0], f"{path}.hessian[0]"),
        two_b=read_integer(hessian[1], f"{path}.hessian[1]"),
        signature=read_integer(_get(value, "signature", path), f"{path}.signature"),
        poincare=read_polynomial(_get(value, "poincare", path), f"{path}.poincare"),
        ambient_dimension=ambient,
    )


def read_wallcross_spec(document: InputDocument, engine: WallCrossingEngine) -> MomentProfileSpec:
    """Levels from minimum to maximum; without "initial" the first quotient is derived from the minimum."""
    expect_kind(document, "wallcross_spec")
    payload = document.payload
    ambient = read_integer(payload.get("ambient_dimension", SIX_MANIFOLD_DIMENSION), "payload.ambient_dimension")
    levels_value = _get(payload, "levels", "payload")
    if not isinstance(levels_value, list):
        raise ParseError("expected an array of levels", field="payload.levels")
    levels = []
    for i, level in enumerate(levels_value):
        path = f"payload.levels[{i}]"
        strata = _get(level, "strata", path)
        if not isinstance(strata, list):
            raise ParseError("expected an array of strata", field=f"{path}.strata")
        levels.append(
            CriticalLevelData(
                read_rational(_get(level, "value", path), f"{path}.value"),
                tuple(read_stratum(s, ambient, f"{path}.strata[{j}]") for j, s in enumerate(strata)),
            )
        )
    if not levels:
        raise ParseError("at least the minimum and maximum levels are required", field="payload.levels")
    initial = payload.get("initial")
    if initial is None:
        signature, poincare = engine.initial_profile_from_minimum(levels[0])
    else:
        signature = read_integer(_get(initial, "signature", "payload.initial"), "payload.initial.signature")
        poincare = read_polynomial(_get(initial, "poincare", "payload.initial"), "payload.initial.poincare")
    return MomentProfileSpec(tuple(levels), signature, poincare, ambient)


def read_ring(value: Any, path: str) -> FourManifoldRing:
    if not isinstance(value, dict):
        raise ParseError("expected an object", field=path)
    form = read_form(_get(value, "form", path), f"{path}.form")
    b1 = read_integer(value.get("b1", 0), f"{path}.b1")
    if "b2" in value and read_integer(value["b2"], f"{path}.b2") != form.dimension:
        raise ParseError(f"b2 = {value['b2']} but the form has dimension {form.dimension}", field=f"{path}.b2")
    cup_value = value.get("cup_12_3", [])
    if not isinstance(cup_value, list):
        raise ParseError("expected a b1 x b2 x b1 array", field=f"{path}.cup_12_3")
    cup = tuple(
        tuple(tuple(read_vector(fiber, f"{path}.cup_12_3[{i}][{j}]")) for j, fiber in enumerate(plane))
        if isinstance(plane, list)
        else ()
        for i, plane in enumerate(cup_value)
    )
    pairing = tuple(tuple(row) for row in read_matrix(value.get("pairing_13", []), f"{path}.pairing_13"))
    volume = read_rational(value.get("volume_normalization", 1), f"{path}.volume_normalization")
    return FourManifoldRing(b1, cup, pairing, form, volume)


def read_hl_data(document: InputDocument) -> HLRequest:
    expect_kind(document, "hl_data")
    payload = document.payload
    ring = read_ring(_get(payload, "ring", "payload"), "payload.ring")
    omega0 = read_vector(_get(payload, "omega0", "payload"), "payload.omega0")
    beta2 = read_vector(payload["beta2"], "payload.beta2") if "beta2" in payload else ClassVector.zero(ring.b2)
    beta4 = read_rational(payload.get("beta4", 0), "payload.beta4")
    epsilon = read_rational(payload["epsilon"], "payload.epsilon") if payload.get("epsilon") is not None else None
    bound = read_integer(payload.get("bound", DEFAULT_EPSILON_BOUND), "payload.bound")
    counterexample = payload.get("counterexample", False)
    if not isinstance(counterexample, bool):
        raise ParseError("expected true or false", field="payload.counterexample")
    return HLRequest(ring, omega0, beta2, beta4, epsilon, bound, counterexample)


# Report encoding


def encode_rational(value: Fraction) -> str:
    return str(Fraction(value))


def encode_vector(values: Sequence[Fraction]) -> List[str]:
    return [encode_rational(v) for v in values]


def encode_polynomial(polynomial: UnivariatePolynomial) -> List[str]:
    return encode_vector(polynomial.coefficients)


def encode_interval(interval: Interval) -> List[Optional[str]]:
    return [
        None if interval.lower is None else encode_rational(interval.lower),
        None if interval.upper is None else encode_rational(interval.upper),
    ]


def encode_sign_verdict(verdict: SignVerdict) -> Dict[str, Any]:
    return {
        "kind": verdict.kind.value,
        "witnesses": [encode_vector(w) for w in verdict.witnesses],
        "root_brackets": [encode_vector(b) for b in verdict.root_brackets],
    }


def encode_piece(interval: Interval, density: UnivariatePolynomial, defect: Optional[UnivariatePolynomial] = None) -> Dict[str, Any]:
    piece = {"interval": encode_interval(interval), "density": encode_polynomial(density), "text": str(density)}
    if defect is not None:
        piece["defect"] = encode_polynomial(defect)
    return piece


def decode_pieces(payload: Dict[str, Any]) -> List[DensityPiece]:
    """Density pieces of a report, as written by encode_piece."""
    pieces = payload.get("pieces")
    if not isinstance(pieces, list) or not pieces:
        raise ParseError("report contains no density pieces", field="payload.pieces")
    return [
        DensityPiece(
            read_interval(_get(p, "interval", f"payload.pieces[{i}]"), f"payload.pieces[{i}].interval"),
            read_polynomial(_get(p, "density", f"payload.pieces[{i}]"), f"payload.pieces[{i}].density"),
        )
        for i, p in enumerate(pieces)
    ]


@dataclass(frozen=True)
class ReportDocument:
    """Output of one command; the payload is plain JSON data."""

    command: str
    payload: Dict[str, Any]
    version: str = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return {"version": self.version, "command": self.command, "payload": self.payload}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ReportDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, line=e.lineno) from e
        if not isinstance(data, dict):
            raise ParseError("report must be a JSON object")
        return cls(
            command=str(_get(data, "command", "report")),
            payload=_get(data, "payload", "report"),
            version=str(_get(data, "version", "report")),
        )
