"""Toolchain for SMADL, the social-machine architecture description
language: parsing with diagnostics, canonical formatting, taxonomy
classification, and deterministic network simulation."""

from .analyzer import (
    DependencyGraph,
    MetaInfo,
    ResolvedNetwork,
    classify_machine,
    classify_network,
    dependency_graph,
    meta_info,
    resolve,
)
from .formatter import format_network
from .model import (
    ConstraintSpec,
    Diagnostic,
    MachineSpec,
    NetworkSpec,
    PortSpec,
    ProcessingUnitSpec,
    PropertyEntry,
    PropertyForm,
    RelationshipSpec,
    RequestSpec,
    SemanticType,
    Severity,
    SourceSpan,
    TaxonomyClass,
    WrapperInterfaceSpec,
    class_join,
    class_leq,
    class_meet,
)
from .parser import ParseResult, parse
from .scenario import (
    BehaviorBinding,
    BehaviorKind,
    Scenario,
    SimConfig,
    load_scenario,
)
from .simulator import (
    EventRecord,
    MachineRuntime,
    MessageEnvelope,
    RecordKind,
    SimReport,
    answer_meta_request,
    check_rate_limit,
    render_trace,
    run_simulation,
)

__version__ = "0.1.0"

__all__ = [
    "BehaviorBinding",
    "BehaviorKind",
    "ConstraintSpec",
    "DependencyGraph",
    "Diagnostic",
    "EventRecord",
    "MachineRuntime",
    "MachineSpec",
    "MessageEnvelope",
    "MetaInfo",
    "NetworkSpec",
    "ParseResult",
    "PortSpec",
    "ProcessingUnitSpec",
    "PropertyEntry",
    "PropertyForm",
    "RecordKind",
    "RelationshipSpec",
    "RequestSpec",
    "ResolvedNetwork",
    "Scenario",
    "SemanticType",
    "Severity",
    "SimConfig",
    "SimReport",
    "SourceSpan",
    "TaxonomyClass",
    "WrapperInterfaceSpec",
    "answer_meta_request",
    "check_rate_limit",
    "class_join",
    "class_leq",
    "class_meet",
    "classify_machine",
    "classify_network",
    "dependency_graph",
    "format_network",
    "load_scenario",
    "meta_info",
    "parse",
    "render_trace",
    "resolve",
    "run_simulation",
]
