"""Deterministic discrete-event execution of a resolved network.

Time advances in integer ticks. Requests are processed at the tick they
are issued; every response arrives ``default_latency`` ticks after the
disposition that produced it. Within one tick, scenario events run in
file order before internally generated deliveries, which run in creation
order; nothing is random, so identical inputs give bit-identical traces
(the seed is recorded in the trace header for future use).

Failure handling is entirely in-model: an unavailable machine, a rate
limit, a missing behavior, a bad parameter, or a forwarding loop all
reject or fail the request with a notification response whose
``root_cause`` names the first machine that failed. Notifications coming
back over a forwarding hop are passed upstream with root cause and
detail preserved, so the client sees who actually broke.

Machine availability is time-based: ``down`` makes the machine reject
requests during ``[t, t + duration)``; in-flight responses still pass
through a down forwarder. Rate limits apply to functionality requests
only (meta-information and subscription requests are protocol traffic);
the window holds accepted requests per caller over the last 3600 ticks.
"""

import heapq
import json
import operator
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .analyzer import MetaInfo, ResolvedNetwork, meta_info
from .formatter import format_property
from .model import PropertyEntry, PropertyForm
from .scenario import (
    BehaviorKind,
    DownEvent,
    MetaQuery,
    MetaRequestEvent,
    RequestEvent,
    Scenario,
    SetStateEvent,
    SimConfig,
    SubscribeEvent,
    UpEvent,
)

RATE_WINDOW_TICKS = 3600  # "per hour" at one tick per second

# Name used on the wire for the standing state-change request.
SUBSCRIBE_REQUEST = "subscribe"

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}


class EnvelopeKind(Enum):
    FUNCTIONALITY_REQUEST = ("request", "Functionality")
    META_REQUEST = ("request", "MetaInformation")
    FUNCTIONALITY_RESPONSE = ("response", "Functionality")
    META_RESPONSE = ("response", "MetaInformation")
    NOTIFICATION_RESPONSE = ("response", "Notification")

    @property
    def is_request(self) -> bool:
        return self.value[0] == "request"

    @property
    def label(self) -> str:
        return self.value[1]


@dataclass(frozen=True)
class MessageEnvelope:
    id: int
    time: int
    source: str
    destination: str
    kind: EnvelopeKind
    correlation_id: int
    request: str
    payload: object = None
    root_cause: str | None = None
    detail: str | None = None


class RecordKind(Enum):
    REQUEST_SENT = "request_sent"
    REQUEST_ACCEPTED = "request_accepted"
    REQUEST_REJECTED = "request_rejected"
    RESPONSE_SENT = "response_sent"
    STATE_CHANGED = "state_changed"
    MACHINE_DOWN = "machine_down"
    MACHINE_UP = "machine_up"
    SUBSCRIPTION_CREATED = "subscription_created"


@dataclass(frozen=True)
class EventRecord:
    seq: int
    time: int
    kind: RecordKind
    source: str = ""
    destination: str = ""
    request: str = ""
    response_kind: str = ""
    payload: object = None
    root_cause: str = ""
    detail: str = ""
    # Envelope accounting (not part of the rendered trace): the envelope a
    # request record belongs to, and the request a response record answers.
    envelope_id: int = -1
    correlation_id: int = -1


@dataclass
class MachineRuntime:
    """Mutable per-machine state during one run."""

    name: str
    current_state: str = "unset"
    down_until: int = 0
    marked_down: bool = False
    # Accepted-request timestamps per caller, pruned to the sliding window.
    rate_windows: dict[str, deque] = field(default_factory=dict)
    # (client, subscribe-envelope id), in subscription order.
    subscribers: list[tuple[str, int]] = field(default_factory=list)

    def is_available(self, now: int) -> bool:
        return now >= self.down_until


@dataclass(frozen=True)
class SimReport:
    accepted: dict[str, int]
    rejected: dict[str, int]
    failures_by_root_cause: dict[str, int]
    response_multiplicity: dict[int, int]
    subscription_deliveries: int

    def to_text(self) -> str:
        lines = ["machines:"]
        for name in self.accepted:
            lines.append(
                f"  {name}: accepted={self.accepted[name]} rejected={self.rejected[name]}"
            )
        lines.append("failures by root cause:")
        if self.failures_by_root_cause:
            for name in sorted(self.failures_by_root_cause):
                lines.append(f"  {name}: {self.failures_by_root_cause[name]}")
        else:
            lines.append("  none")
        lines.append("response multiplicity:")
        for count in sorted(self.response_multiplicity):
            lines.append(f"  {count} response(s): {self.response_multiplicity[count]} request(s)")
        lines.append(f"subscription deliveries: {self.subscription_deliveries}")
        return "\n".join(lines) + "\n"


def check_rate_limit(
    runtime: MachineRuntime, caller: str, now: int, constraint: PropertyEntry
) -> bool:
    """Would accepting one more request from ``caller`` keep the bound?

    Counts accepted requests in the sliding window ``(now - 3600, now]``
    plus the candidate one, compared with the constraint's operator and
    bound. Expired timestamps are pruned as a side effect.
    """
    window = runtime.rate_windows.setdefault(caller, deque())
    cutoff = now - RATE_WINDOW_TICKS
    while window and window[0] <= cutoff:
        window.popleft()
    return _OPS[constraint.comparison_operator](len(window) + 1, constraint.value)


def answer_meta_request(runtime: MachineRuntime, meta: MetaInfo, query: MetaQuery) -> object:
    """Payload of a meta-information response for one query."""
    if query is MetaQuery.WHOAMI:
        return meta.description
    if query is MetaQuery.STATE:
        return runtime.current_state
    if query is MetaQuery.CONSTRAINTS:
        return [format_property(prop) for prop in meta.constraints]
    signatures = []
    for name, param_types, response_types in meta.request_signatures:
        text = f"{name}({', '.join(param_types)})"
        if response_types:
            text += " -> " + ", ".join(response_types)
        signatures.append(text)
    return signatures


class _Engine:
    def __init__(self, resolved: ResolvedNetwork, scenario: Scenario):
        self.resolved = resolved
        self.scenario = scenario
        self.latency = scenario.config.default_latency
        self.runtimes = {name: MachineRuntime(name) for name in resolved.machine_index}
        self.metas = {name: meta_info(resolved, name) for name in resolved.machine_index}
        self.records: list[EventRecord] = []
        self.queue: list[tuple[int, int, tuple]] = []  # heap of (time, creation order, action)
        self.queue_count = 0
        self.next_envelope_id = 0
        # Per in-flight request id: hops taken so far, for loop detection.
        self.chains: dict[int, tuple[tuple[str, str], ...]] = {}
        # Nested request id -> the request envelope it was forwarded for.
        self.pending_forwards: dict[int, MessageEnvelope] = {}
        self.request_ids: list[int] = []
        self.responses_by_request: dict[int, int] = {}
        self.subscribe_ids: set[int] = set()
        self.accepted = {name: 0 for name in resolved.machine_index}
        self.rejected = {name: 0 for name in resolved.machine_index}
        self.failures: dict[str, int] = {}
        self.subscription_deliveries = 0

    # -- bookkeeping ---------------------------------------------------------

    def record(self, time: int, kind: RecordKind, **fields) -> None:
        self.records.append(EventRecord(seq=len(self.records), time=time, kind=kind, **fields))

    def schedule(self, time: int, action: tuple) -> None:
        # Creation order breaks time ties, so heap order is total and the
        # action tuples themselves are never compared.
        heapq.heappush(self.queue, (time, self.queue_count, action))
        self.queue_count += 1

    def new_envelope_id(self) -> int:
        self.next_envelope_id += 1
        return self.next_envelope_id - 1

    # -- main loop ------------------------------------------------------------

    def run(self) -> tuple[list[EventRecord], SimReport]:
        events = self.scenario.events
        i = 0
        while i < len(events) or self.queue:
            # Scenario events run before same-tick internal deliveries.
            if i < len(events) and (not self.queue or events[i].time <= self.queue[0][0]):
                self.dispatch_event(events[i])
                i += 1
            else:
                time, _, action = heapq.heappop(self.queue)
                self.dispatch_action(time, action)
        return self.records, self.build_report()

    def dispatch_event(self, event) -> None:
        if isinstance(event, RequestEvent):
            payload = list(event.arguments)
            self.issue_functionality_request(
                event.time, event.client, event.machine, event.request, payload, chain=()
            )
        elif isinstance(event, MetaRequestEvent):
            self.issue_meta_request(event)
        elif isinstance(event, SubscribeEvent):
            self.issue_subscribe(event)
        elif isinstance(event, DownEvent):
            self.apply_down(event)
        elif isinstance(event, UpEvent):
            self.apply_up(event.time, event.machine)
        elif isinstance(event, SetStateEvent):
            self.apply_set_state(event)

    def dispatch_action(self, time: int, action: tuple) -> None:
        if action[0] == "deliver":
            self.deliver(action[1])
        else:  # scheduled end of an outage
            _, machine, until = action
            runtime = self.runtimes[machine]
            if runtime.marked_down and runtime.down_until <= until:
                runtime.marked_down = False
                self.record(time, RecordKind.MACHINE_UP, source=machine)

    # -- requests --------------------------------------------------------------

    def issue_functionality_request(
        self,
        time: int,
        source: str,
        machine_name: str,
        request_name: str,
        payload,
        chain: tuple[tuple[str, str], ...],
    ) -> int:
        env = MessageEnvelope(
            id=self.new_envelope_id(),
            time=time,
            source=source,
            destination=machine_name,
            kind=EnvelopeKind.FUNCTIONALITY_REQUEST,
            correlation_id=-1,
            request=request_name,
            payload=payload,
        )
        self.request_ids.append(env.id)
        self.chains[env.id] = chain + ((machine_name, request_name),)
        self.record(
            time,
            RecordKind.REQUEST_SENT,
            source=source,
            destination=machine_name,
            request=request_name,
            response_kind=env.kind.label,
            payload=payload,
            envelope_id=env.id,
        )
        runtime = self.runtimes[machine_name]

        if not runtime.is_available(time):
            self.reject(env, "MACHINE_UNAVAILABLE")
            return env.id
        if not self.rate_limit_allows(runtime, source, time):
            self.reject(env, "CONSTRAINT_VIOLATION")
            return env.id
        binding = self.scenario.bindings.get((machine_name, request_name))
        if binding is None:
            self.reject(env, "NO_BEHAVIOR_BOUND")
            return env.id

        self.accept(env)
        runtime.rate_windows.setdefault(source, deque()).append(time)
        self.run_behavior(env, binding)
        return env.id

    def rate_limit_allows(self, runtime: MachineRuntime, caller: str, now: int) -> bool:
        machine = self.resolved.machine_index[runtime.name]
        for constraint in machine.constraints:
            for prop in constraint.properties:
                if (
                    prop.key == "request_per_hour"
                    and prop.form is PropertyForm.COMPARISON
                    and not check_rate_limit(runtime, caller, now, prop)
                ):
                    return False
        return True

    def run_behavior(self, env: MessageEnvelope, binding) -> None:
        machine_name = env.destination
        if binding.kind is BehaviorKind.SUCC:
            args = env.payload
            if (
                isinstance(args, list)
                and len(args) == 1
                and isinstance(args[0], (int, float))
                and not isinstance(args[0], bool)
            ):
                self.respond(env, EnvelopeKind.FUNCTIONALITY_RESPONSE, args[0] + 1)
            else:
                self.respond(
                    env,
                    EnvelopeKind.NOTIFICATION_RESPONSE,
                    None,
                    root_cause=machine_name,
                    detail="BAD_PARAMETER",
                )
        elif binding.kind is BehaviorKind.ECHO:
            self.respond(env, EnvelopeKind.FUNCTIONALITY_RESPONSE, env.payload)
        elif binding.kind is BehaviorKind.CONST:
            self.respond(env, EnvelopeKind.FUNCTIONALITY_RESPONSE, binding.value)
        else:  # forward: prosumer glue over a declared relationship
            target = (binding.target_machine, binding.target_request)
            chain = self.chains[env.id]
            if target in chain:
                self.respond(
                    env,
                    EnvelopeKind.NOTIFICATION_RESPONSE,
                    None,
                    root_cause=machine_name,
                    detail="FORWARD_CYCLE",
                )
                return
            # Responses are only ever queued, never delivered synchronously,
            # so registering the pending hop after issuing is safe.
            nested_id = self.issue_functionality_request(
                env.time, machine_name, target[0], target[1], env.payload, chain
            )
            self.pending_forwards[nested_id] = env

    def issue_meta_request(self, event: MetaRequestEvent) -> None:
        env = MessageEnvelope(
            id=self.new_envelope_id(),
            time=event.time,
            source=event.client,
            destination=event.machine,
            kind=EnvelopeKind.META_REQUEST,
            correlation_id=-1,
            request=event.query.value,
        )
        self.request_ids.append(env.id)
        self.record(
            event.time,
            RecordKind.REQUEST_SENT,
            source=event.client,
            destination=event.machine,
            request=event.query.value,
            response_kind=env.kind.label,
            envelope_id=env.id,
        )
        runtime = self.runtimes[event.machine]
        if not runtime.is_available(event.time):
            self.reject(env, "MACHINE_UNAVAILABLE")
            return
        self.accept(env)
        payload = answer_meta_request(runtime, self.metas[event.machine], event.query)
        self.respond(env, EnvelopeKind.META_RESPONSE, payload)

    def issue_subscribe(self, event: SubscribeEvent) -> None:
        env = MessageEnvelope(
            id=self.new_envelope_id(),
            time=event.time,
            source=event.client,
            destination=event.machine,
            kind=EnvelopeKind.FUNCTIONALITY_REQUEST,
            correlation_id=-1,
            request=SUBSCRIBE_REQUEST,
        )
        self.request_ids.append(env.id)
        self.subscribe_ids.add(env.id)
        self.record(
            event.time,
            RecordKind.REQUEST_SENT,
            source=event.client,
            destination=event.machine,
            request=SUBSCRIBE_REQUEST,
            response_kind=env.kind.label,
            envelope_id=env.id,
        )
        runtime = self.runtimes[event.machine]
        if not runtime.is_available(event.time):
            self.reject(env, "MACHINE_UNAVAILABLE")
            return
        self.accept(env)
        if all(client != event.client for client, _ in runtime.subscribers):
            runtime.subscribers.append((event.client, env.id))
            self.record(
                event.time,
                RecordKind.SUBSCRIPTION_CREATED,
                source=event.client,
                destination=event.machine,
            )

    def accept(self, env: MessageEnvelope) -> None:
        self.accepted[env.destination] += 1
        self.record(
            env.time,
            RecordKind.REQUEST_ACCEPTED,
            source=env.source,
            destination=env.destination,
            request=env.request,
            envelope_id=env.id,
        )

    def reject(self, env: MessageEnvelope, detail: str) -> None:
        self.rejected[env.destination] += 1
        self.record(
            env.time,
            RecordKind.REQUEST_REJECTED,
            source=env.source,
            destination=env.destination,
            request=env.request,
            detail=detail,
            envelope_id=env.id,
        )
        self.respond(
            env,
            EnvelopeKind.NOTIFICATION_RESPONSE,
            None,
            root_cause=env.destination,
            detail=detail,
        )

    # -- responses --------------------------------------------------------------

    def respond(
        self,
        request_env: MessageEnvelope,
        kind: EnvelopeKind,
        payload,
        root_cause: str | None = None,
        detail: str | None = None,
    ) -> None:
        response = MessageEnvelope(
            id=self.new_envelope_id(),
            time=request_env.time + self.latency,
            source=request_env.destination,
            destination=request_env.source,
            kind=kind,
            correlation_id=request_env.id,
            request=request_env.request,
            payload=payload,
            root_cause=root_cause,
            detail=detail,
        )
        self.schedule(response.time, ("deliver", response))

    def deliver(self, response: MessageEnvelope) -> None:
        self.record(
            response.time,
            RecordKind.RESPONSE_SENT,
            source=response.source,
            destination=response.destination,
            request=response.request,
            response_kind=response.kind.label,
            payload=response.payload,
            root_cause=response.root_cause or "",
            detail=response.detail or "",
            envelope_id=response.id,
            correlation_id=response.correlation_id,
        )
        self.responses_by_request[response.correlation_id] = (
            self.responses_by_request.get(response.correlation_id, 0) + 1
        )
        if (
            response.correlation_id in self.subscribe_ids
            and response.kind is EnvelopeKind.FUNCTIONALITY_RESPONSE
        ):
            self.subscription_deliveries += 1
        if response.destination not in self.resolved.machine_index:
            if response.kind is EnvelopeKind.NOTIFICATION_RESPONSE and response.root_cause:
                self.failures[response.root_cause] = (
                    self.failures.get(response.root_cause, 0) + 1
                )
            return

        parent = self.pending_forwards.pop(response.correlation_id, None)
        if parent is None:
            return
        # Pass the downstream answer upward; failures keep their origin.
        relayed = MessageEnvelope(
            id=self.new_envelope_id(),
            time=response.time + self.latency,
            source=parent.destination,
            destination=parent.source,
            kind=response.kind
            if response.kind is EnvelopeKind.NOTIFICATION_RESPONSE
            else EnvelopeKind.FUNCTIONALITY_RESPONSE,
            correlation_id=parent.id,
            request=parent.request,
            payload=response.payload,
            root_cause=response.root_cause,
            detail=response.detail,
        )
        self.schedule(relayed.time, ("deliver", relayed))

    # -- environment events -------------------------------------------------------

    def apply_down(self, event: DownEvent) -> None:
        runtime = self.runtimes[event.machine]
        until = event.time + event.duration
        if until > runtime.down_until:
            runtime.down_until = until
            self.schedule(until, ("up_marker", event.machine, until))
        if not runtime.marked_down:
            runtime.marked_down = True
            self.record(
                event.time,
                RecordKind.MACHINE_DOWN,
                source=event.machine,
                detail=str(event.duration),
            )

    def apply_up(self, time: int, machine: str) -> None:
        runtime = self.runtimes[machine]
        runtime.down_until = min(runtime.down_until, time)
        if runtime.marked_down:
            runtime.marked_down = False
            self.record(time, RecordKind.MACHINE_UP, source=machine)

    def apply_set_state(self, event: SetStateEvent) -> None:
        runtime = self.runtimes[event.machine]
        runtime.current_state = event.state
        self.record(event.time, RecordKind.STATE_CHANGED, source=event.machine, payload=event.state)
        for client, subscribe_id in runtime.subscribers:
            update = MessageEnvelope(
                id=self.new_envelope_id(),
                time=event.time + self.latency,
                source=event.machine,
                destination=client,
                kind=EnvelopeKind.FUNCTIONALITY_RESPONSE,
                correlation_id=subscribe_id,
                request=SUBSCRIBE_REQUEST,
                payload=event.state,
            )
            self.schedule(update.time, ("deliver", update))

    # -- report ----------------------------------------------------------------------

    def build_report(self) -> SimReport:
        histogram: dict[int, int] = {}
        for request_id in self.request_ids:
            count = self.responses_by_request.get(request_id, 0)
            histogram[count] = histogram.get(count, 0) + 1
        return SimReport(
            accepted=self.accepted,
            rejected=self.rejected,
            failures_by_root_cause=self.failures,
            response_multiplicity=histogram,
            subscription_deliveries=self.subscription_deliveries,
        )


def run_simulation(
    resolved: ResolvedNetwork, scenario: Scenario
) -> tuple[list[EventRecord], SimReport]:
    """Execute a scenario against a resolved network deterministically."""
    return _Engine(resolved, scenario).run()


# -- trace serialization ------------------------------------------------------

_TRACE_FIELDS = (
    "seq",
    "time",
    "kind",
    "source",
    "destination",
    "request",
    "responseKind",
    "payload",
    "rootCause",
    "detail",
)


def _payload_text(payload) -> str:
    if payload is None:
        return ""
    return json.dumps(payload, separators=(",", ":"), sort_keys=True)


def render_trace(records: list[EventRecord], config: SimConfig) -> str:
    """Render records as tab-separated lines behind a config header.

    The output is byte-exact for identical inputs; golden tests rely on
    the field order: seq, time, kind, source, destination, request,
    responseKind, payload, rootCause, detail.
    """
    lines = [
        f"# seed={config.seed} horizon={config.horizon} defaultLatency={config.default_latency}"
    ]
    for r in records:
        lines.append(
            "\t".join(
                (
                    str(r.seq),
                    str(r.time),
                    r.kind.value,
                    r.source,
                    r.destination,
                    r.request,
                    r.response_kind,
                    _payload_text(r.payload),
                    r.root_cause,
                    r.detail,
                )
            )
        )
    return "\n".join(lines) + "\n"
