"""Semantic analysis: name resolution, taxonomy classification, machine
meta-information, and the consumes-dependency graph.

A machine consumes when it has an outgoing relationship; it provides when
another machine consumes it or when it declares a wrapper interface with
at least one request (its services are reachable even if nothing in the
declared network happens to call them). The taxonomy class is the lattice
join of those two capabilities.
"""

from dataclasses import dataclass

from .model import (
    Diagnostic,
    MachineSpec,
    NetworkSpec,
    PropertyEntry,
    PropertyForm,
    Severity,
    TaxonomyClass,
    class_from_capabilities,
    has_errors,
)


@dataclass(frozen=True)
class ResolvedNetwork:
    """A validated network with its name index, edge list, and classes."""

    spec: NetworkSpec
    machine_index: dict[str, MachineSpec]
    consumes_edges: tuple[tuple[str, str], ...]
    per_machine_class: dict[str, TaxonomyClass]


@dataclass(frozen=True)
class MetaInfo:
    """What a machine can say about itself when asked."""

    machine_name: str
    description: str
    declared_states: tuple[str, ...]
    # (request name, parameter type names, response type names) per request.
    request_signatures: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...]
    constraints: tuple[PropertyEntry, ...]


@dataclass(frozen=True)
class DependencyGraph:
    edges: tuple[tuple[str, str], ...]
    # Strongly connected components with more than one member, each in
    # machine declaration order.
    cycles: tuple[tuple[str, ...], ...]
    warnings: tuple[Diagnostic, ...]


def _declares_service(machine: MachineSpec) -> bool:
    return machine.wrapper_interface is not None and bool(machine.wrapper_interface.requests)


def _classify(machine: MachineSpec, outgoing: set[str], incoming: set[str]) -> TaxonomyClass:
    consumes = machine.name in outgoing
    provides = machine.name in incoming or _declares_service(machine)
    return class_from_capabilities(consumes, provides)


def resolve(network: NetworkSpec) -> tuple[ResolvedNetwork | None, list[Diagnostic]]:
    """Validate a parsed network; a ResolvedNetwork is returned iff no errors."""
    diagnostics: list[Diagnostic] = []

    def error(code: str, message: str, span) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, code, message, span))

    machine_index: dict[str, MachineSpec] = {}
    for machine in network.machines:
        if machine.name in machine_index:
            error(
                "SEM_DUPLICATE_MACHINE",
                f"machine '{machine.name}' is declared more than once",
                machine.span,
            )
            continue
        machine_index[machine.name] = machine
        _check_machine(machine, diagnostics)

    edges: list[tuple[str, str]] = []
    for rel in network.relationships:
        ok = True
        for endpoint in (rel.from_machine, rel.to_machine):
            if endpoint not in machine_index:
                error(
                    "SEM_UNKNOWN_MACHINE",
                    f"relationship references undeclared machine '{endpoint}'",
                    rel.span,
                )
                ok = False
        if ok and rel.from_machine == rel.to_machine:
            error(
                "SEM_SELF_RELATIONSHIP",
                f"machine '{rel.from_machine}' cannot consume itself",
                rel.span,
            )
            ok = False
        if ok:
            edges.append((rel.from_machine, rel.to_machine))

    outgoing = {src for src, _ in edges}
    incoming = {dst for _, dst in edges}
    for machine in network.machines:
        if (
            _declares_service(machine)
            and machine.name not in incoming
            and machine.name not in outgoing
        ):
            diagnostics.append(
                Diagnostic(
                    Severity.WARNING,
                    "SEM_UNCONSUMED_INTERFACE",
                    f"machine '{machine.name}' declares an interface but has no relationships",
                    machine.span,
                )
            )

    if has_errors(diagnostics):
        return None, diagnostics

    classes = {m.name: _classify(m, outgoing, incoming) for m in network.machines}
    resolved = ResolvedNetwork(
        spec=network,
        machine_index=machine_index,
        consumes_edges=tuple(edges),
        per_machine_class=classes,
    )
    return resolved, diagnostics


def _check_machine(machine: MachineSpec, diagnostics: list[Diagnostic]) -> None:
    def error(code: str, message: str, span) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, code, message, span))

    unit = machine.processing_unit
    if unit is not None:
        seen_states: set[str] = set()
        for state in unit.states:
            if state in seen_states:
                error(
                    "SEM_DUPLICATE_STATE",
                    f"machine '{machine.name}' declares state '{state}' more than once",
                    unit.span,
                )
            seen_states.add(state)
        for ports in (unit.inputs, unit.outputs):
            seen_ports: set[str] = set()
            for port in ports:
                if port.name in seen_ports:
                    error(
                        "SEM_DUPLICATE_PORT",
                        f"duplicate {port.direction.value.lower()} port '{port.name}' "
                        f"in machine '{machine.name}'",
                        port.span,
                    )
                seen_ports.add(port.name)

    for constraint in machine.constraints:
        for prop in constraint.properties:
            if prop.form is PropertyForm.COMPARISON and not prop.is_valid_comparison:
                error(
                    "SEM_BAD_CONSTRAINT",
                    f"constraint property '{prop.key}' compares against a non-numeric value",
                    prop.span,
                )

    if machine.wrapper_interface is not None:
        seen_requests: set[str] = set()
        for request in machine.wrapper_interface.requests:
            if request.name in seen_requests:
                error(
                    "SEM_DUPLICATE_REQUEST",
                    f"interface of machine '{machine.name}' declares request "
                    f"'{request.name}' more than once",
                    request.span,
                )
            seen_requests.add(request.name)
            seen_responses: set[str] = set()
            for rname, _ in request.responses:
                if rname in seen_responses:
                    error(
                        "SEM_DUPLICATE_RESPONSE",
                        f"request '{request.name}' declares response '{rname}' more than once",
                        request.span,
                    )
                seen_responses.add(rname)


def classify_machine(resolved: ResolvedNetwork, name: str) -> TaxonomyClass:
    """Class of one machine; raises KeyError for an unknown name."""
    machine = resolved.machine_index[name]
    outgoing = {src for src, _ in resolved.consumes_edges}
    incoming = {dst for _, dst in resolved.consumes_edges}
    return _classify(machine, outgoing, incoming)


def classify_network(resolved: ResolvedNetwork) -> dict[str, TaxonomyClass]:
    """Classes for every machine, in declaration order."""
    return {m.name: classify_machine(resolved, m.name) for m in resolved.spec.machines}


def meta_info(resolved: ResolvedNetwork, name: str) -> MetaInfo:
    """Assemble the self-description a machine serves over the wire."""
    machine = resolved.machine_index[name]
    signatures = tuple(
        (
            request.name,
            tuple(str(p.data_type) for p in request.parameters),
            tuple(str(rtype) for _, rtype in request.responses),
        )
        for request in machine.requests
    )
    constraints = tuple(p for c in machine.constraints for p in c.properties)

    description = None
    for prop in constraints:
        if prop.key == "description" and prop.form is PropertyForm.ASSIGNMENT_STRING:
            description = prop.value
            break
    if description is None:
        label = str(resolved.per_machine_class[name]).lower()
        description = f"{name}: {label} social machine"

    return MetaInfo(
        machine_name=name,
        description=description,
        declared_states=machine.states,
        request_signatures=signatures,
        constraints=constraints,
    )


def dependency_graph(resolved: ResolvedNetwork) -> DependencyGraph:
    """Consumes edges plus any strongly connected components of size > 1.

    Cycles are legal (mutually consuming prosumers) and reported as
    warnings, not errors.
    """
    order = {m.name: i for i, m in enumerate(resolved.spec.machines)}
    adjacency: dict[str, list[str]] = {name: [] for name in order}
    for src, dst in resolved.consumes_edges:
        if dst not in adjacency[src]:
            adjacency[src].append(dst)

    components = _tarjan_components(list(order), adjacency)
    cycles = tuple(
        tuple(sorted(component, key=order.__getitem__))
        for component in components
        if len(component) > 1
    )
    cycles = tuple(sorted(cycles, key=lambda c: order[c[0]]))

    warnings = tuple(
        Diagnostic(
            Severity.WARNING,
            "SEM_DEPENDENCY_CYCLE",
            "machines consume each other in a cycle: " + ", ".join(cycle),
            resolved.machine_index[cycle[0]].span,
        )
        for cycle in cycles
    )
    return DependencyGraph(edges=resolved.consumes_edges, cycles=cycles, warnings=warnings)


def _tarjan_components(nodes: list[str], adjacency: dict[str, list[str]]) -> list[list[str]]:
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        # Iterative DFS: (node, iterator position into its successors).
        work = [(root, 0)]
        while work:
            node, succ_pos = work.pop()
            if succ_pos == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            successors = adjacency[node]
            for i in range(succ_pos, len(successors)):
                succ = successors[i]
                if succ not in index:
                    work.append((node, i + 1))
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if advanced:
                continue
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return components
