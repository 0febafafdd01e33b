"""Mechanical application of an approved move: plan byte edits, apply them.

A plan is a pure description (file, byte range, replacement) computed
against a fresh index; apply re-checks file hashes, writes each file
atomically, then re-parses the whole project and verifies the method
really migrated. Any reparse or verification problem rolls every file
back to its pre-apply bytes.

Instance moves come in two shapes. When the target is a parameter type,
that parameter becomes the receiver and remaining host-member accesses
are routed through an appended host parameter. When the target is a
field type, the move is a receiver swap: the body may touch nothing of
the host but that field (enforced upstream), and call sites gain the
field as an extra hop.
"""

from __future__ import annotations

import difflib
import hashlib
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import javasrc
from .errors import (
    InfeasibleMove,
    IoError,
    PlanConflict,
    ReparseFailed,
    StaleIndex,
)
from .filters import check_feasibility, find_call_sites, instance_destination_types
from .model import (
    ClassInfo,
    MethodInfo,
    ProjectIndex,
    build_index,
    collect_local_decls,
)

_SIMPLE_CHAIN_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*(\.[A-Za-z_$][A-Za-z0-9_$]*)*")
_IMPORT_RE = re.compile(rb"(?m)^import\s[^;]+;")
_PACKAGE_RE = re.compile(rb"(?m)^package\s[^;]+;")


@dataclass
class EditOp:
    file: str
    start: int
    end: int
    text: str

    def to_doc(self) -> dict:
        return {"file": self.file, "start": self.start, "end": self.end, "text": self.text}


@dataclass
class MovePlan:
    method: str  # signature as declared in the host
    host: str
    target: str
    route: str  # static | param | field
    edits: list[EditOp]  # per file: descending offsets, non-overlapping
    new_signature: str
    host_param_added: bool
    call_sites_rewritten: int
    file_hashes: dict[str, str]

    def to_doc(self) -> dict:
        return {
            "method": self.method,
            "host": self.host,
            "target": self.target,
            "route": self.route,
            "new_signature": self.new_signature,
            "host_param_added": self.host_param_added,
            "call_sites_rewritten": self.call_sites_rewritten,
            "edits": [e.to_doc() for e in self.edits],
            "file_hashes": dict(self.file_hashes),
        }


def plan_from_doc(doc: dict) -> MovePlan:
    return MovePlan(
        method=doc["method"],
        host=doc["host"],
        target=doc["target"],
        route=doc["route"],
        edits=[
            EditOp(e["file"], int(e["start"]), int(e["end"]), e["text"])
            for e in doc["edits"]
        ],
        new_signature=doc["new_signature"],
        host_param_added=bool(doc["host_param_added"]),
        call_sites_rewritten=int(doc["call_sites_rewritten"]),
        file_hashes=dict(doc["file_hashes"]),
    )


@dataclass
class ApplyResult:
    files_changed: list[str]
    call_sites_rewritten: int
    reparse_ok: bool
    index: ProjectIndex | None = None  # fresh post-apply index

    def to_doc(self) -> dict:
        return {
            "files_changed": self.files_changed,
            "call_sites_rewritten": self.call_sites_rewritten,
            "reparse_ok": self.reparse_ok,
        }


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _slice_tokens(index: ProjectIndex, host: ClassInfo, m: MethodInfo):
    data = index.file_bytes(host.source_file)
    text = data[m.span[0] : m.span[1]].decode()
    return text, javasrc.tokenize(text.encode())


def _header_indices(tokens: list, m: MethodInfo) -> tuple[int, int, int]:
    """(name token idx, open-paren idx, close-paren idx) of the declaration."""
    for i, t in enumerate(tokens):
        if t.kind != "IDENT" or t.text != m.name:
            continue
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        prev = tokens[i - 1] if i > 0 else None
        if nxt is None or nxt.text != "(":
            continue
        if prev is not None and prev.text == ".":
            continue
        depth = 0
        for j in range(i + 1, len(tokens)):
            if tokens[j].text == "(":
                depth += 1
            elif tokens[j].text == ")":
                depth -= 1
                if depth == 0:
                    return i, i + 1, j
        break
    raise PlanConflict(f"cannot locate declaration of {m.signature}")


def _param_spans(tokens: list, open_i: int, close_i: int) -> list[tuple[int, int]]:
    """Byte spans of each parameter between the header parens."""
    spans: list[tuple[int, int]] = []
    depth_paren = 0
    depth_angle = 0
    depth_brack = 0
    seg_start: int | None = None
    last_end: int | None = None
    for i in range(open_i + 1, close_i):
        t = tokens[i]
        if seg_start is None:
            seg_start = t.start
        if t.text == "(":
            depth_paren += 1
        elif t.text == ")":
            depth_paren -= 1
        elif t.text == "[":
            depth_brack += 1
        elif t.text == "]":
            depth_brack -= 1
        elif t.text == "<":
            depth_angle += 1
        elif t.text == ">":
            depth_angle = max(0, depth_angle - 1)
        elif (
            t.text == ","
            and depth_paren == 0
            and depth_angle == 0
            and depth_brack == 0
        ):
            spans.append((seg_start, last_end))
            seg_start = None
            continue
        last_end = t.end
    if seg_start is not None and last_end is not None:
        spans.append((seg_start, last_end))
    return spans


def _body_range(tokens: list, close_i: int) -> tuple[int, int]:
    """Token index range (open brace, close brace) of the method body."""
    depth = 0
    open_i = None
    for j in range(close_i + 1, len(tokens)):
        if tokens[j].text == "{":
            if open_i is None:
                open_i = j
            depth += 1
        elif tokens[j].text == "}":
            depth -= 1
            if depth == 0 and open_i is not None:
                return open_i, j
    raise PlanConflict("method has no body to move")


def _apply_slice_edits(text: str, edits: list[tuple[int, int, str]]) -> str:
    for start, end, rep in sorted(edits, key=lambda e: -e[0]):
        text = text[:start] + rep + text[end:]
    return text


def _pick_host_param_name(host: ClassInfo, taken: set[str]) -> str:
    base = host.leaf_name[0].lower() + host.leaf_name[1:]
    for cand in (base, "host" + host.leaf_name, base + "1"):
        if cand not in taken:
            return cand
    n = 2
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def _needs_parens(expr: str) -> bool:
    return _SIMPLE_CHAIN_RE.fullmatch(expr) is None


def _host_member_names(host: ClassInfo) -> set[str]:
    names = {f.name for f in host.fields}
    names |= {m.name for m in host.methods if not m.is_constructor}
    return names


def plan_move(
    index: ProjectIndex, m: MethodInfo, host: ClassInfo, target: str | ClassInfo
) -> MovePlan:
    """Build the full edit script for one approved move."""
    t = index.lookup(target) if isinstance(target, str) else target
    if t is None:
        raise InfeasibleMove("TARGET_NOT_FOUND", str(target))
    index.check_fresh(host.source_file)
    index.check_fresh(t.source_file)
    verdict = check_feasibility(index, m, host, t)
    if not verdict.feasible:
        raise InfeasibleMove(
            ",".join(verdict.reasons),
            f"{m.signature}: {host.qualified_name} -> {t.qualified_name}",
        )

    if m.is_static:
        edits, new_sig, host_param, n_sites = _plan_static(index, m, host, t)
        route = "static"
    else:
        routes = instance_destination_types(index, m, host)
        route = routes[t.qualified_name]
        if route == "param":
            edits, new_sig, host_param, n_sites = _plan_param_route(index, m, host, t)
        else:
            edits, new_sig, host_param, n_sites = _plan_field_route(index, m, host, t)

    if t.method(new_sig) is not None:
        raise PlanConflict(
            f"{t.qualified_name} already declares {new_sig}; move would collide"
        )

    ordered = _order_and_check(edits)
    touched = sorted({e.file for e in ordered})
    hashes = {p: _sha(index.file_bytes(p)) for p in touched}
    return MovePlan(
        method=m.signature,
        host=host.qualified_name,
        target=t.qualified_name,
        route=route,
        edits=ordered,
        new_signature=new_sig,
        host_param_added=host_param,
        call_sites_rewritten=n_sites,
        file_hashes=hashes,
    )


def _order_and_check(edits: list[EditOp]) -> list[EditOp]:
    by_file: dict[str, list[EditOp]] = {}
    for e in edits:
        by_file.setdefault(e.file, []).append(e)
    ordered: list[EditOp] = []
    for path in sorted(by_file):
        group = sorted(by_file[path], key=lambda e: (-e.start, -e.end))
        for hi, lo in zip(group, group[1:]):
            if lo.end > hi.start:
                raise PlanConflict(
                    f"overlapping edits in {path}: "
                    f"[{lo.start},{lo.end}) and [{hi.start},{hi.end})"
                )
            if lo.start == hi.start and lo.end == hi.end == lo.start:
                raise PlanConflict(f"coincident insertions in {path} at {lo.start}")
        ordered.extend(group)
    return ordered


def _insertion_edit(index: ProjectIndex, t: ClassInfo, method_text: str) -> EditOp:
    brace = t.body_close - 1  # the class's closing '}'
    return EditOp(t.source_file, brace, brace, "\n    " + method_text + "\n")


def _removal_edit(host: ClassInfo, m: MethodInfo) -> EditOp:
    return EditOp(host.source_file, m.span[0], m.span[1], "")


def _file_package_and_imports(
    index: ProjectIndex, path: str
) -> tuple[str, list[tuple[str, bool, bool]]]:
    for c in index.classes.values():
        if c.source_file == path:
            return c.package, c.imports
    return "", []


def _import_edit(
    index: ProjectIndex, path: str, wanted: set[str]
) -> EditOp | None:
    """One edit adding any missing single-type imports, or None."""
    pkg, imports = _file_package_and_imports(index, path)
    needed = []
    for q in sorted(wanted):
        if "." not in q:
            continue  # default package: nothing to import
        q_pkg = q.rsplit(".", 1)[0]
        if q_pkg == pkg:
            continue
        if any(p == q and not wc for p, st, wc in imports if not st):
            continue
        if any(wc and p == q_pkg for p, st, wc in imports):
            continue
        needed.append(q)
    if not needed:
        return None
    data = index.file_bytes(path)
    block = "".join(f"\nimport {q};" for q in needed)
    imports_found = list(_IMPORT_RE.finditer(data))
    if imports_found:
        pos = imports_found[-1].end()
        return EditOp(path, pos, pos, block)
    pkg_m = _PACKAGE_RE.search(data)
    if pkg_m:
        return EditOp(path, pkg_m.end(), pkg_m.end(), "\n" + block)
    return EditOp(path, 0, 0, block.lstrip("\n") + "\n\n")


def _host_top_level_qualified(host: ClassInfo) -> str:
    outer = host.simple_name.split(".")[0]
    return f"{host.package}.{outer}" if host.package else outer


def _plan_static(index, m, host, t):
    text, tokens = _slice_tokens(index, host, m)
    _, open_i, close_i = _header_indices(tokens, m)
    body_open, body_close = _body_range(tokens, close_i)
    body_tokens = tokens[body_open + 1 : body_close]
    locals_ = set(collect_local_decls(body_tokens))
    params = {p.name for p in m.parameters}
    members = _host_member_names(host)

    slice_edits: list[tuple[int, int, str]] = []
    referenced_host = False
    for i in range(body_open + 1, body_close):
        tok = tokens[i]
        if tok.kind != "IDENT" or tok.text in javasrc.JAVA_KEYWORDS:
            continue
        prev = tokens[i - 1] if i > 0 else None
        if prev is not None and prev.text == ".":
            continue
        if tok.text == host.leaf_name:
            referenced_host = True  # already qualified by class name
            continue
        if tok.text == m.name or tok.text not in members:
            continue
        if tok.text in locals_ or tok.text in params:
            continue
        slice_edits.append((tok.start, tok.start, f"{host.leaf_name}."))
        referenced_host = True
    new_text = _apply_slice_edits(text, slice_edits)

    edits = [_removal_edit(host, m), _insertion_edit(index, t, new_text)]

    sites = find_call_sites(index, host, m)
    needs_target: set[str] = set()
    for s in sites:
        if s.receiver_kind == "complex":
            raise PlanConflict(
                f"call site in {s.enclosing_class} has a receiver expression "
                "too complex to requalify"
            )
        edits.append(
            EditOp(s.file, s.receiver_start, s.name_start, f"{t.leaf_name}.")
        )
        needs_target.add(s.file)

    for path in needs_target:
        imp = _import_edit(index, path, {t.qualified_name})
        if imp:
            edits.append(imp)
    if referenced_host:
        imp = _import_edit(
            index, t.source_file, {_host_top_level_qualified(host)}
        )
        if imp:
            edits.append(imp)

    return edits, m.signature, False, len(sites)


def _plan_param_route(index, m, host, t):
    text, tokens = _slice_tokens(index, host, m)
    _, open_i, close_i = _header_indices(tokens, m)
    body_open, body_close = _body_range(tokens, close_i)
    body_tokens = tokens[body_open + 1 : body_close]

    param_j = None
    for j, p in enumerate(m.parameters):
        if index.resolve_type(p.type_text, host) == t.qualified_name:
            param_j = j
            break
    if param_j is None:
        raise PlanConflict(f"{t.qualified_name} is not a parameter type of {m.signature}")
    p_name = m.parameters[param_j].name

    locals_ = set(collect_local_decls(body_tokens))
    kept_params = [p for j, p in enumerate(m.parameters) if j != param_j]
    members = _host_member_names(host)
    taken = locals_ | {p.name for p in kept_params} | members | {p_name}
    host_param = _pick_host_param_name(host, taken)

    # one scan decides whether the host is still needed and rewrites the body
    slice_edits: list[tuple[int, int, str]] = []
    needs_host = False
    n = len(tokens)
    for i in range(body_open + 1, body_close):
        tok = tokens[i]
        if tok.kind != "IDENT":
            continue
        prev = tokens[i - 1] if i > 0 else None
        nxt = tokens[i + 1] if i + 1 < n else None
        if tok.text == "this":
            slice_edits.append((tok.start, tok.end, host_param))
            needs_host = True
            continue
        if tok.text in javasrc.JAVA_KEYWORDS:
            continue
        if prev is not None and prev.text == ".":
            continue
        if tok.text == p_name:
            if nxt is not None and nxt.text == ".":
                slice_edits.append((tok.start, nxt.end, ""))
            else:
                slice_edits.append((tok.start, tok.end, "this"))
            continue
        if tok.text in locals_ or tok.text in {p.name for p in kept_params}:
            continue
        if tok.text in members:
            if tok.text == m.name and nxt is not None and nxt.text == "(":
                raise PlanConflict(
                    f"{m.signature} calls itself; recursive instance moves "
                    "are not supported"
                )
            slice_edits.append((tok.start, tok.start, f"{host_param}."))
            needs_host = True

    # rebuild the parameter list
    spans = _param_spans(tokens, open_i, close_i)
    parts = [text[a:b] for k, (a, b) in enumerate(spans) if k != param_j]
    if needs_host:
        parts.append(f"{host.simple_name} {host_param}")
    slice_edits.append(
        (tokens[open_i].end, tokens[close_i].start, ", ".join(parts))
    )
    new_text = _apply_slice_edits(text, slice_edits)

    sig_types = [p.simple_type() for p in kept_params]
    if needs_host:
        sig_types.append(host.leaf_name)
    new_sig = f"{m.name}({','.join(sig_types)})"

    edits = [_removal_edit(host, m), _insertion_edit(index, t, new_text)]

    sites = find_call_sites(index, host, m)
    for s in sites:
        data = index.file_bytes(s.file)
        args = [data[a:b].decode() for a, b in s.args]
        recv_expr = args[param_j]
        rest = [a for k, a in enumerate(args) if k != param_j]
        if needs_host:
            former = (
                "this" if s.receiver_kind in ("none", "this") else s.receiver_text
            )
            rest.append(former)
        recv = f"({recv_expr})" if _needs_parens(recv_expr) else recv_expr
        new_call = f"{recv}.{m.name}({', '.join(rest)})"
        edits.append(EditOp(s.file, s.full_span[0], s.full_span[1], new_call))

    # the moved text must see its remaining project types from t's file
    wanted: set[str] = set()
    if needs_host:
        wanted.add(_host_top_level_qualified(host))
    for p in kept_params:
        q = index.resolve_type(p.type_text, host)
        if q:
            wanted.add(q)
    if m.return_type:
        q = index.resolve_type(m.return_type, host)
        if q:
            wanted.add(q)
    wanted.discard(t.qualified_name)
    if wanted:
        imp = _import_edit(index, t.source_file, wanted)
        if imp:
            edits.append(imp)

    return edits, new_sig, needs_host, len(sites)


def _plan_field_route(index, m, host, t):
    text, tokens = _slice_tokens(index, host, m)
    _, open_i, close_i = _header_indices(tokens, m)
    body_open, body_close = _body_range(tokens, close_i)

    anchors = [
        f.name
        for f in host.fields
        if index.resolve_type(f.type_text, host) == t.qualified_name
    ]
    if not anchors:
        raise PlanConflict(f"no field of type {t.qualified_name} in {host.qualified_name}")
    anchor = anchors[0]

    slice_edits: list[tuple[int, int, str]] = []
    i = body_open + 1
    n = body_close
    while i < n:
        tok = tokens[i]
        if tok.kind != "IDENT":
            i += 1
            continue
        prev = tokens[i - 1] if i > 0 else None
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if tok.text == "this" and nxt is not None and nxt.text == ".":
            after = tokens[i + 2] if i + 2 < len(tokens) else None
            if after is not None and after.text == anchor:
                dot2 = tokens[i + 3] if i + 3 < len(tokens) else None
                if dot2 is not None and dot2.text == ".":
                    slice_edits.append((tok.start, dot2.end, ""))
                    i += 4
                else:
                    slice_edits.append((tok.start, after.end, "this"))
                    i += 3
                continue
        if tok.text == anchor and (prev is None or prev.text != "."):
            if nxt is not None and nxt.text == ".":
                slice_edits.append((tok.start, nxt.end, ""))
            else:
                slice_edits.append((tok.start, tok.end, "this"))
        i += 1
    new_text = _apply_slice_edits(text, slice_edits)

    edits = [_removal_edit(host, m), _insertion_edit(index, t, new_text)]

    sites = find_call_sites(index, host, m)
    for s in sites:
        if s.receiver_kind == "none":
            edits.append(EditOp(s.file, s.name_start, s.name_start, f"{anchor}."))
        elif s.receiver_kind == "this":
            edits.append(
                EditOp(s.file, s.receiver_start, s.name_start, f"this.{anchor}.")
            )
        elif s.receiver_kind == "var":
            edits.append(
                EditOp(
                    s.file,
                    s.receiver_start,
                    s.name_start,
                    f"{s.receiver_text}.{anchor}.",
                )
            )
        else:
            raise PlanConflict(
                f"call site in {s.enclosing_class} has a receiver "
                "too complex for a receiver-swap move"
            )

    wanted: set[str] = set()
    for p in m.parameters:
        q = index.resolve_type(p.type_text, host)
        if q:
            wanted.add(q)
    if m.return_type:
        q = index.resolve_type(m.return_type, host)
        if q:
            wanted.add(q)
    wanted.discard(t.qualified_name)
    if wanted:
        imp = _import_edit(index, t.source_file, wanted)
        if imp:
            edits.append(imp)

    return edits, m.signature, False, len(sites)


def _edited_bytes(original: bytes, edits: list[EditOp]) -> bytes:
    data = original
    for e in sorted(edits, key=lambda e: (-e.start, -e.end)):
        data = data[: e.start] + e.text.encode() + data[e.end :]
    return data


def plan_preview(index: ProjectIndex, plan: MovePlan) -> str:
    """Unified diff of every file the plan touches, nothing written."""
    chunks: list[str] = []
    by_file: dict[str, list[EditOp]] = {}
    for e in plan.edits:
        by_file.setdefault(e.file, []).append(e)
    for path in sorted(by_file):
        old = index.file_bytes(path)
        new = _edited_bytes(old, by_file[path])
        rel = _relative_to_roots(index, path)
        diff = difflib.unified_diff(
            old.decode().splitlines(keepends=True),
            new.decode().splitlines(keepends=True),
            fromfile=f"a/{rel}",
            tofile=f"b/{rel}",
        )
        chunks.append("".join(diff))
    return "".join(chunks)


def _relative_to_roots(index: ProjectIndex, path: str) -> str:
    p = Path(path)
    for root in index.source_roots:
        try:
            return p.relative_to(root).as_posix()
        except ValueError:
            continue
    return p.as_posix()


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".move-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def apply(
    index: ProjectIndex, plan: MovePlan, reparse_hook=None
) -> ApplyResult:
    """Write the plan's edits, re-parse, verify; roll back on any failure."""
    originals: dict[str, bytes] = {}
    for path, digest in plan.file_hashes.items():
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from exc
        if _sha(data) != digest:
            raise StaleIndex(f"{path} changed since the plan was made")
        originals[path] = data

    by_file: dict[str, list[EditOp]] = {}
    for e in plan.edits:
        by_file.setdefault(e.file, []).append(e)

    old_host = index.lookup(plan.host)
    old_target = index.lookup(plan.target)
    old_total = sum(len(c.methods) for c in index.classes.values())

    written: list[str] = []
    try:
        for path in sorted(by_file):
            _atomic_write(path, _edited_bytes(originals[path], by_file[path]))
            written.append(path)
    except OSError as exc:
        _rollback(originals, written)
        raise IoError(f"apply failed while writing: {exc}") from exc

    try:
        new_index = build_index(index.source_roots)
        hook_ok = True if reparse_hook is None else bool(reparse_hook(new_index))
        problems = [] if hook_ok else ["reparse hook rejected the result"]
        if hook_ok:
            problems = _verify_move(new_index, plan, old_host, old_target, old_total)
    except Exception as exc:
        _rollback(originals, written)
        raise ReparseFailed(f"project does not parse after apply: {exc}") from exc
    if problems:
        _rollback(originals, written)
        raise ReparseFailed("; ".join(problems))

    return ApplyResult(
        files_changed=sorted(written),
        call_sites_rewritten=plan.call_sites_rewritten,
        reparse_ok=True,
        index=new_index,
    )


def _verify_move(new_index, plan, old_host, old_target, old_total) -> list[str]:
    problems: list[str] = []
    host = new_index.lookup(plan.host)
    target = new_index.lookup(plan.target)
    if host is None:
        problems.append(f"host {plan.host} missing after apply")
    if target is None:
        problems.append(f"target {plan.target} missing after apply")
    if problems:
        return problems
    if target.method(plan.new_signature) is None:
        problems.append(f"{plan.new_signature} not found in {plan.target}")
    if host.method(plan.method) is not None and plan.host != plan.target:
        problems.append(f"{plan.method} still present in {plan.host}")
    if old_host is not None and len(host.methods) != len(old_host.methods) - 1:
        problems.append("host method count did not drop by one")
    if old_target is not None and len(target.methods) != len(old_target.methods) + 1:
        problems.append("target method count did not grow by one")
    new_total = sum(len(c.methods) for c in new_index.classes.values())
    if new_total != old_total:
        problems.append("total method count changed")
    return problems


def _rollback(originals: dict[str, bytes], written: list[str]) -> None:
    for path in written:
        _atomic_write(path, originals[path])
