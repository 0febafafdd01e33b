"""Sanity filtering and mechanical feasibility checks for move candidates.

Two layers of defense run before anything reaches a recommendation list:
`sanity_filter` removes methods that must never move alone (constructors,
getters/setters, overrides, tests, empty bodies), and the feasibility checks
decide whether a concrete (method, host, target) move is mechanically sound.
Both are pure functions over the immutable index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import javasrc
from .model import ClassInfo, MethodInfo, ProjectIndex

# Sanity reason codes
CONSTRUCTOR = "CONSTRUCTOR"
GETTER_SETTER = "GETTER_SETTER"
OVERRIDE = "OVERRIDE"
TEST = "TEST"
EMPTY_BODY = "EMPTY_BODY"

# Feasibility reason codes
TARGET_NOT_FOUND = "TARGET_NOT_FOUND"
TARGET_NOT_REACHABLE = "TARGET_NOT_REACHABLE"
LOSES_REFERENCES = "LOSES_REFERENCES"
HIERARCHY_CONFLICT = "HIERARCHY_CONFLICT"
DUPLICATE_SIGNATURE = "DUPLICATE_SIGNATURE"


@dataclass
class FilterVerdict:
    method: MethodInfo
    passed: bool
    reasons: list[str]

    def to_doc(self) -> dict:
        return {
            "method": self.method.signature,
            "passed": self.passed,
            "reasons": self.reasons,
        }


@dataclass
class FeasibilityVerdict:
    method: str  # signature
    host: str  # qualified name
    target: str  # qualified name, or the unresolvable raw text
    feasible: bool
    reasons: list[str]

    def to_doc(self) -> dict:
        return {
            "method": self.method,
            "host": self.host,
            "target": self.target,
            "feasible": self.feasible,
            "reasons": self.reasons,
        }


def sanity_filter(cls: ClassInfo) -> list[FilterVerdict]:
    """One verdict per declared method, in declaration order."""
    verdicts: list[FilterVerdict] = []
    for m in sorted(cls.methods, key=lambda m: m.span[0]):
        reasons: list[str] = []
        if m.is_constructor:
            reasons.append(CONSTRUCTOR)
        if m.is_getter_setter:
            reasons.append(GETTER_SETTER)
        if m.is_override:
            reasons.append(OVERRIDE)
        if m.is_test:
            reasons.append(TEST)
        if m.is_empty_or_comment_only or not m.has_body:
            reasons.append(EMPTY_BODY)
        verdicts.append(FilterVerdict(method=m, passed=not reasons, reasons=reasons))
    return verdicts


def surviving_methods(cls: ClassInfo) -> list[MethodInfo]:
    return [v.method for v in sanity_filter(cls) if v.passed]


def _resolve_target(index: ProjectIndex, target: str | ClassInfo) -> ClassInfo | None:
    if isinstance(target, ClassInfo):
        return target
    return index.lookup(target)


def instance_destination_types(
    index: ProjectIndex, m: MethodInfo, host: ClassInfo
) -> dict[str, str]:
    """Map of qualified target name -> how it is reachable (field|param).

    Parameter types win when a type is both, because the executor prefers
    turning a parameter into the receiver.
    """
    dests: dict[str, str] = {}
    for f in host.fields:
        q = index.resolve_type(f.type_text, host)
        if q is not None:
            dests.setdefault(q, "field")
    for p in m.parameters:
        q = index.resolve_type(p.type_text, host)
        if q is not None:
            dests[q] = "param"
    dests.pop(host.qualified_name, None)
    return dests


def _member_visible_from(member_mods: list[str], host: ClassInfo, target: ClassInfo) -> bool:
    """Can code inside target reference this host member (qualified or via a
    host reference)? Conservative: private never; package-visible only when
    the packages match."""
    if "private" in member_mods:
        return False
    if "public" in member_mods:
        return True
    return host.package == target.package


def check_instance_feasibility(
    index: ProjectIndex, m: MethodInfo, host: ClassInfo, target: str | ClassInfo
) -> FeasibilityVerdict:
    reasons: list[str] = []
    t = _resolve_target(index, target)
    target_name = target.qualified_name if isinstance(target, ClassInfo) else str(target)
    if t is None:
        return FeasibilityVerdict(m.signature, host.qualified_name, target_name, False, [TARGET_NOT_FOUND])

    if t.qualified_name == host.qualified_name:
        reasons.append(TARGET_NOT_REACHABLE)
    if t.is_interface or t.is_enum:
        reasons.append(TARGET_NOT_REACHABLE)

    dests = instance_destination_types(index, m, host)
    route = dests.get(t.qualified_name)
    if route is None and TARGET_NOT_REACHABLE not in reasons:
        reasons.append(TARGET_NOT_REACHABLE)

    if m.is_override:
        reasons.append(HIERARCHY_CONFLICT)
    if any(tm.signature == m.signature for tm in t.methods):
        reasons.append(DUPLICATE_SIGNATURE)

    host_refs = [
        (kind, name)
        for kind, owner, name in m.referenced_members
        if owner == host.qualified_name and name != m.name
    ]
    if route == "param":
        # Every referenced host member will be reached through an appended
        # host parameter; it must stay visible from the target's package.
        for kind, name in host_refs:
            mods = _member_mods(host, kind, name)
            if not _member_visible_from(mods, host, t):
                reasons.append(LOSES_REFERENCES)
                break
    elif route == "field":
        # Receiver-swap move: the only host member the body may touch is the
        # field being promoted to receiver, and call sites outside the host
        # must be able to read that field.
        anchors = {
            f.name
            for f in host.fields
            if index.resolve_type(f.type_text, host) == t.qualified_name
        }
        extra = [name for _, name in host_refs if name not in anchors]
        if extra or m.uses_this:
            # a bare `this` cannot survive a receiver swap; only the anchor
            # field itself may be touched
            reasons.append(LOSES_REFERENCES)
        else:
            sites = find_call_sites(index, host, m)
            external = [s for s in sites if s.enclosing_class != host.qualified_name]
            if external:
                anchor_fields = [f for f in host.fields if f.name in anchors]
                if any(f.is_private for f in anchor_fields):
                    reasons.append(LOSES_REFERENCES)
            if any(s.receiver_kind == "complex" for s in sites):
                reasons.append(LOSES_REFERENCES)

    # dedupe, stable order
    seen: list[str] = []
    for r in reasons:
        if r not in seen:
            seen.append(r)
    return FeasibilityVerdict(
        m.signature, host.qualified_name, t.qualified_name, not seen, seen
    )


def check_static_feasibility(
    index: ProjectIndex, m: MethodInfo, host: ClassInfo, target: str | ClassInfo
) -> FeasibilityVerdict:
    reasons: list[str] = []
    t = _resolve_target(index, target)
    target_name = target.qualified_name if isinstance(target, ClassInfo) else str(target)
    if t is None:
        return FeasibilityVerdict(m.signature, host.qualified_name, target_name, False, [TARGET_NOT_FOUND])

    if t.qualified_name == host.qualified_name:
        reasons.append(TARGET_NOT_REACHABLE)
    if t.is_interface:
        reasons.append(TARGET_NOT_REACHABLE)

    if any(tm.signature == m.signature for tm in t.methods):
        reasons.append(DUPLICATE_SIGNATURE)

    for kind, owner, name in m.referenced_members:
        if owner != host.qualified_name or name == m.name:
            continue
        mods = _member_mods(host, kind, name)
        if not _member_visible_from(mods, host, t):
            reasons.append(LOSES_REFERENCES)
            break

    seen: list[str] = []
    for r in reasons:
        if r not in seen:
            seen.append(r)
    return FeasibilityVerdict(
        m.signature, host.qualified_name, t.qualified_name, not seen, seen
    )


def check_feasibility(
    index: ProjectIndex, m: MethodInfo, host: ClassInfo, target: str | ClassInfo
) -> FeasibilityVerdict:
    if m.is_static:
        return check_static_feasibility(index, m, host, target)
    return check_instance_feasibility(index, m, host, target)


def _member_mods(host: ClassInfo, kind: str, name: str) -> list[str]:
    if kind == "field":
        f = host.field_named(name)
        if f is not None:
            return f.modifiers
    hits = [mm for mm in host.methods if mm.name == name]
    if hits:
        return hits[0].modifiers
    return []


# ---------------------------------------------------------------------------
# Call-site scanning (shared with the executor)


@dataclass
class CallSite:
    file: str
    enclosing_class: str  # qualified name
    name_start: int  # byte offset of the method-name token
    open_paren: int
    close_paren: int  # offset just past ')'
    receiver_start: int  # == name_start when unqualified
    receiver_text: str  # '' when unqualified
    receiver_kind: str  # 'none' | 'this' | 'var' | 'static' | 'complex'
    args: list[tuple[int, int]] = field(default_factory=list)

    @property
    def full_span(self) -> tuple[int, int]:
        return (self.receiver_start, self.close_paren)


def find_call_sites(
    index: ProjectIndex, host: ClassInfo, m: MethodInfo
) -> list[CallSite]:
    """Locate every invocation of host.m across the project, best-effort.

    Matches by method name and argument count: unqualified calls inside the
    host class, `this.`-qualified calls, calls through a variable whose
    declared type is the host, and `Host.`-qualified static calls. Calls
    through a more complex receiver expression are reported with kind
    'complex' (found, but not mechanically rewritable).
    """
    sites: list[CallSite] = []
    arity = len(m.parameters)
    for path in sorted(index.file_hashes):
        data = index.file_bytes(path)
        if m.name.encode() not in data:
            continue
        tokens = javasrc.tokenize(data)
        classes_here = [c for c in index.classes.values() if c.source_file == path]
        for i, t in enumerate(tokens):
            if t.kind != "IDENT" or t.text != m.name:
                continue
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is None or nxt.text != "(":
                continue
            if path == host.source_file and m.span[0] <= t.start < m.span[1]:
                continue  # inside the method itself (its declaration or recursion)
            args = _argument_spans(tokens, i + 1)
            if args is None or len(args[0]) != arity:
                continue
            arg_spans, close = args
            enclosing = _enclosing_class(classes_here, t.start)
            prev = tokens[i - 1] if i > 0 else None
            if prev is None or prev.text != ".":
                if enclosing is None or enclosing.qualified_name != host.qualified_name:
                    continue  # unqualified call in a foreign class: not ours
                sites.append(
                    CallSite(
                        file=path,
                        enclosing_class=enclosing.qualified_name,
                        name_start=t.start,
                        open_paren=tokens[i + 1].start,
                        close_paren=close,
                        receiver_start=t.start,
                        receiver_text="",
                        receiver_kind="none",
                        args=arg_spans,
                    )
                )
                continue
            recv = _receiver_expression(tokens, i - 1)
            if recv is None:
                continue
            recv_start, recv_text, recv_kind_hint = recv
            kind = _classify_receiver(
                index, recv_text, recv_kind_hint, enclosing, host, tokens, i, m
            )
            if kind is None:
                continue  # receiver is some other type: not a call to host.m
            sites.append(
                CallSite(
                    file=path,
                    enclosing_class=(
                        enclosing.qualified_name if enclosing is not None else ""
                    ),
                    name_start=t.start,
                    open_paren=tokens[i + 1].start,
                    close_paren=close,
                    receiver_start=recv_start,
                    receiver_text=recv_text,
                    receiver_kind=kind,
                    args=arg_spans,
                )
            )
    return sites


def _argument_spans(
    tokens: list[javasrc.Token], open_idx: int
) -> tuple[list[tuple[int, int]], int] | None:
    """Spans of top-level arguments plus the offset past ')'."""
    depth = 0
    spans: list[tuple[int, int]] = []
    arg_start: int | None = None
    for j in range(open_idx, len(tokens)):
        t = tokens[j]
        if t.text in ("(", "[", "{"):
            depth += 1
            if depth == 1:
                continue
        elif t.text in (")", "]", "}"):
            depth -= 1
            if depth == 0:
                if arg_start is not None:
                    spans.append((arg_start, tokens[j - 1].end))
                return spans, t.end
            continue
        if depth >= 1:
            if depth == 1 and t.text == ",":
                if arg_start is not None:
                    spans.append((arg_start, tokens[j - 1].end))
                arg_start = None
                continue
            if arg_start is None:
                arg_start = t.start
    return None


def _receiver_expression(
    tokens: list[javasrc.Token], dot_idx: int
) -> tuple[int, str, str] | None:
    """Walk left from the '.' to find the receiver expression span.

    Returns (start offset, text, hint) where hint is 'this', 'ident',
    'dotted', or 'complex'.
    """
    j = dot_idx - 1
    if j < 0:
        return None
    t = tokens[j]
    if t.kind == "IDENT" and t.text == "this":
        return t.start, "this", "this"
    if t.kind == "IDENT":
        # Possibly a dotted chain: a.b.m( means walk left across ident '.' ident.
        start = t.start
        text_parts = [t.text]
        k = j - 1
        while k - 1 >= 0 and tokens[k].text == "." and tokens[k - 1].kind == "IDENT":
            if tokens[k - 1].text in javasrc.JAVA_KEYWORDS:
                break
            text_parts.append(tokens[k - 1].text)
            start = tokens[k - 1].start
            k -= 2
        text = ".".join(reversed(text_parts))
        return start, text, ("ident" if len(text_parts) == 1 else "dotted")
    if t.text in (")", "]"):
        # Balanced group: method-call or array receiver. Rewritable in
        # principle, but we refuse to reason about its type.
        return t.start, "", "complex"
    return None


def _classify_receiver(
    index: ProjectIndex,
    recv_text: str,
    hint: str,
    enclosing: ClassInfo | None,
    host: ClassInfo,
    tokens: list[javasrc.Token],
    name_idx: int,
    m: MethodInfo,
) -> str | None:
    """Decide whether this receiver denotes the host; return the site kind."""
    if hint == "complex":
        return "complex"
    if hint == "this":
        if enclosing is not None and enclosing.qualified_name == host.qualified_name:
            return "this"
        return None
    ctx = enclosing if enclosing is not None else host
    # A variable in scope: enclosing method's params/locals, then fields.
    if hint == "ident":
        var_type = _variable_type(index, ctx, tokens, name_idx, recv_text)
        if var_type is not None:
            resolved = index.resolve_type(var_type, ctx)
            return "var" if resolved == host.qualified_name else None
    resolved = index.resolve_type(recv_text, ctx)
    if resolved == host.qualified_name:
        return "static"
    return None


def _variable_type(
    index: ProjectIndex,
    ctx: ClassInfo,
    tokens: list[javasrc.Token],
    name_idx: int,
    var_name: str,
) -> str | None:
    offset = tokens[name_idx].start
    from .model import collect_local_decls

    for method in ctx.methods:
        if method.span[0] <= offset < method.span[1]:
            for p in method.parameters:
                if p.name == var_name:
                    return p.type_text
            body = index.method_body_tokens(ctx, method)
            decls = collect_local_decls(body)
            if var_name in decls:
                return decls[var_name]
            break
    f = ctx.field_named(var_name)
    if f is not None:
        return f.type_text
    return None


def _enclosing_class(classes: list[ClassInfo], offset: int) -> ClassInfo | None:
    best: ClassInfo | None = None
    for c in classes:
        lo, hi = c.body_span
        if lo <= offset < hi:
            if best is None or (lo >= best.body_span[0] and hi <= best.body_span[1]):
                best = c
    return best
