"""Scenario scripts: the external stimuli driving one simulation run.

File format: UTF-8 lines, ``#`` comments, one directive per line:

    at <tick> bind <machine>.<request> builtin:<succ|echo|const:<value>|forward:<machine>.<request>>
    at <tick> request <client> <machine>.<request> [<arg>...]
    at <tick> meta <client> <machine> <whoami|state|constraints|signatures>
    at <tick> subscribe <client> <machine>
    at <tick> down <machine> <duration-ticks>
    at <tick> up <machine>
    at <tick> state <machine> "<state name>"

Ticks are non-negative integers (1 tick = 1 second, so an hour is 3600
ticks). Bindings are static wiring for the whole run: the tick on a
``bind`` line only orders it in the file, and a later bind for the same
request replaces an earlier one. All names are validated against the
resolved network; a scenario is returned iff the script has no errors.
"""

import shlex
from dataclasses import dataclass, field
from enum import Enum

from .analyzer import ResolvedNetwork
from .model import Diagnostic, Severity, SourceSpan


class MetaQuery(Enum):
    WHOAMI = "whoami"
    STATE = "state"
    CONSTRAINTS = "constraints"
    SIGNATURES = "signatures"


@dataclass(frozen=True)
class RequestEvent:
    time: int
    client: str
    machine: str
    request: str
    arguments: tuple[str | int | float, ...] = ()


@dataclass(frozen=True)
class MetaRequestEvent:
    time: int
    client: str
    machine: str
    query: MetaQuery


@dataclass(frozen=True)
class SubscribeEvent:
    time: int
    client: str
    machine: str


@dataclass(frozen=True)
class DownEvent:
    time: int
    machine: str
    duration: int


@dataclass(frozen=True)
class UpEvent:
    time: int
    machine: str


@dataclass(frozen=True)
class SetStateEvent:
    time: int
    machine: str
    state: str


ScenarioEvent = (
    RequestEvent | MetaRequestEvent | SubscribeEvent | DownEvent | UpEvent | SetStateEvent
)


class BehaviorKind(Enum):
    SUCC = "succ"
    ECHO = "echo"
    CONST = "const"
    FORWARD = "forward"


@dataclass(frozen=True)
class BehaviorBinding:
    kind: BehaviorKind
    value: str | int | float | None = None
    target_machine: str | None = None
    target_request: str | None = None


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    default_latency: int = 1
    horizon: int = 0


@dataclass(frozen=True)
class Scenario:
    events: tuple[ScenarioEvent, ...]
    bindings: dict[tuple[str, str], BehaviorBinding] = field(default_factory=dict)
    config: SimConfig = SimConfig()


class _LineError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _coerce(token: str) -> str | int | float:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def _split_target(token: str) -> tuple[str, str]:
    machine, dot, request = token.partition(".")
    if not dot or not machine or not request:
        raise _LineError("SCN_BAD_LINE", f"expected <machine>.<request>, got {token!r}")
    return machine, request


class _Loader:
    def __init__(self, resolved: ResolvedNetwork):
        self.resolved = resolved

    def machine(self, name: str):
        spec = self.resolved.machine_index.get(name)
        if spec is None:
            raise _LineError("SCN_UNKNOWN_MACHINE", f"unknown machine '{name}'")
        return spec

    def request(self, machine_name: str, request_name: str) -> None:
        spec = self.machine(machine_name)
        if request_name not in {r.name for r in spec.requests}:
            raise _LineError(
                "SCN_UNKNOWN_REQUEST",
                f"machine '{machine_name}' declares no request '{request_name}'",
            )

    def parse_line(self, words: list[str]) -> ScenarioEvent | tuple:
        if len(words) < 3 or words[0] != "at":
            raise _LineError("SCN_BAD_LINE", "expected 'at <tick> <directive> ...'")
        try:
            time = int(words[1])
        except ValueError:
            raise _LineError("SCN_BAD_LINE", f"bad tick {words[1]!r}") from None
        if time < 0:
            raise _LineError("SCN_BAD_LINE", "ticks must be non-negative")

        directive, args = words[2], words[3:]
        if directive == "bind":
            return self.parse_bind(args)
        if directive == "request":
            if len(args) < 2:
                raise _LineError("SCN_BAD_LINE", "expected 'request <client> <machine>.<request>'")
            machine, request = _split_target(args[1])
            self.request(machine, request)
            return RequestEvent(
                time, args[0], machine, request, tuple(_coerce(a) for a in args[2:])
            )
        if directive == "meta":
            if len(args) != 3:
                raise _LineError("SCN_BAD_LINE", "expected 'meta <client> <machine> <query>'")
            self.machine(args[1])
            try:
                query = MetaQuery(args[2])
            except ValueError:
                raise _LineError("SCN_BAD_LINE", f"unknown meta query {args[2]!r}") from None
            return MetaRequestEvent(time, args[0], args[1], query)
        if directive == "subscribe":
            if len(args) != 2:
                raise _LineError("SCN_BAD_LINE", "expected 'subscribe <client> <machine>'")
            self.machine(args[1])
            return SubscribeEvent(time, args[0], args[1])
        if directive == "down":
            if len(args) != 2:
                raise _LineError("SCN_BAD_LINE", "expected 'down <machine> <duration>'")
            self.machine(args[0])
            try:
                duration = int(args[1])
            except ValueError:
                raise _LineError("SCN_BAD_LINE", f"bad duration {args[1]!r}") from None
            if duration < 1:
                raise _LineError("SCN_BAD_LINE", "down duration must be at least 1 tick")
            return DownEvent(time, args[0], duration)
        if directive == "up":
            if len(args) != 1:
                raise _LineError("SCN_BAD_LINE", "expected 'up <machine>'")
            self.machine(args[0])
            return UpEvent(time, args[0])
        if directive == "state":
            if len(args) != 2:
                raise _LineError("SCN_BAD_LINE", "expected 'state <machine> <state>'")
            spec = self.machine(args[0])
            if args[1] not in spec.states:
                raise _LineError(
                    "SCN_UNKNOWN_STATE",
                    f"machine '{args[0]}' declares no state '{args[1]}'",
                )
            return SetStateEvent(time, args[0], args[1])
        raise _LineError("SCN_BAD_LINE", f"unknown directive {directive!r}")

    def parse_bind(self, args: list[str]) -> tuple:
        if len(args) != 2 or not args[1].startswith("builtin:"):
            raise _LineError(
                "SCN_BAD_LINE", "expected 'bind <machine>.<request> builtin:<behavior>'"
            )
        machine, request = _split_target(args[0])
        self.request(machine, request)
        spec = args[1][len("builtin:") :]

        if spec == "succ":
            binding = BehaviorBinding(BehaviorKind.SUCC)
        elif spec == "echo":
            binding = BehaviorBinding(BehaviorKind.ECHO)
        elif spec.startswith("const:"):
            binding = BehaviorBinding(BehaviorKind.CONST, value=_coerce(spec[len("const:") :]))
        elif spec.startswith("forward:"):
            target_machine, target_request = _split_target(spec[len("forward:") :])
            self.request(target_machine, target_request)
            if (machine, target_machine) not in self.resolved.consumes_edges:
                raise _LineError(
                    "SCN_NO_RELATIONSHIP",
                    f"no relationship ({machine} to {target_machine}) to forward over",
                )
            binding = BehaviorBinding(
                BehaviorKind.FORWARD,
                target_machine=target_machine,
                target_request=target_request,
            )
        else:
            raise _LineError("SCN_BAD_LINE", f"unknown behavior {spec!r}")
        return ("bind", (machine, request), binding)


def load_scenario(
    text: str,
    resolved: ResolvedNetwork,
    *,
    seed: int = 0,
    default_latency: int = 1,
    horizon: int | None = None,
) -> tuple[Scenario | None, list[Diagnostic]]:
    """Parse and validate a scenario script against a resolved network.

    The effective horizon is raised to the last event time if the given
    one is smaller (every scripted event always executes).
    """
    loader = _Loader(resolved)
    diagnostics: list[Diagnostic] = []
    events: list[ScenarioEvent] = []
    bindings: dict[tuple[str, str], BehaviorBinding] = {}

    for line_no, raw in enumerate(text.split("\n"), start=1):
        span = SourceSpan(line_no, 1, line_no, len(raw) + 1)
        try:
            words = shlex.split(raw, comments=True)
        except ValueError as exc:
            diagnostics.append(
                Diagnostic(Severity.ERROR, "SCN_BAD_LINE", f"unparseable line: {exc}", span)
            )
            continue
        if not words:
            continue
        try:
            parsed = loader.parse_line(words)
        except _LineError as err:
            diagnostics.append(Diagnostic(Severity.ERROR, err.code, err.message, span))
            continue
        if isinstance(parsed, tuple):
            _, key, binding = parsed
            bindings[key] = binding
        else:
            events.append(parsed)

    if any(d.is_error for d in diagnostics):
        return None, diagnostics

    events.sort(key=lambda e: e.time)  # stable: file order within a tick
    last = events[-1].time if events else 0
    config = SimConfig(
        seed=seed,
        default_latency=default_latency,
        horizon=max(horizon if horizon is not None else last, last),
    )
    return Scenario(events=tuple(events), bindings=bindings, config=config), diagnostics
