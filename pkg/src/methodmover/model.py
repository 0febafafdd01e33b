"""Project index: classes, methods, fields, and source access for a Java tree.

The index is the shared substrate for filtering, retrieval, embedding, and
editing. It records byte spans for every declaration so downstream code can
slice source text directly, and file content hashes so an index persisted to
disk can detect that the tree changed underneath it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import javasrc
from .errors import EmptyProject, IoError, MethodNotInClass, StaleIndex

SCHEMA_VERSION = 1

IGNORED_DIRS = {".git", "build", "target", "out", "node_modules", ".gradle", ".idea"}

TEST_ANNOTATIONS = {"Test", "ParameterizedTest", "RepeatedTest", "TestFactory"}


@dataclass
class ParamInfo:
    name: str
    type_text: str

    def simple_type(self) -> str:
        return simple_type_name(self.type_text)


@dataclass
class FieldInfo:
    name: str
    type_text: str  # raw declared text
    declared_type: str  # qualified name if resolvable, else raw text
    is_static: bool
    modifiers: list[str]
    span: tuple[int, int]

    def simple_type(self) -> str:
        return simple_type_name(self.type_text)

    @property
    def is_private(self) -> bool:
        return "private" in self.modifiers

    @property
    def is_public(self) -> bool:
        return "public" in self.modifiers


@dataclass
class MethodInfo:
    name: str
    parameters: list[ParamInfo]
    return_type: str | None  # None for constructors
    modifiers: list[str]
    annotations: list[str]
    span: tuple[int, int]
    has_body: bool
    docstring: str | None
    is_constructor: bool = False
    is_override: bool = False
    is_getter_setter: bool = False
    is_test: bool = False
    is_empty_or_comment_only: bool = False
    # (kind in {field, method}, owner qualified name, member name), best-effort.
    referenced_members: list[tuple[str, str, str]] = field(default_factory=list)
    uses_this: bool = False

    @property
    def signature(self) -> str:
        """Matching form used for gold sets and duplicate checks."""
        return f"{self.name}({','.join(p.simple_type() for p in self.parameters)})"

    @property
    def full_signature(self) -> str:
        """Normalized text including the return type."""
        ret = "" if self.return_type is None else simple_type_name(self.return_type) + " "
        return f"{ret}{self.signature}"

    @property
    def is_static(self) -> bool:
        return "static" in self.modifiers

    @property
    def is_private(self) -> bool:
        return "private" in self.modifiers

    @property
    def is_public(self) -> bool:
        return "public" in self.modifiers

    def host_refs(self, host_qualified: str) -> set[str]:
        """Names of host members this body references."""
        return {
            name
            for kind, owner, name in self.referenced_members
            if owner == host_qualified
        }


@dataclass
class ClassInfo:
    qualified_name: str
    package_path: list[str]
    simple_name: str  # dotted tail for static nested classes (Outer.Inner)
    kind: str  # class | interface | enum
    modifiers: list[str]
    super_types: list[str]  # raw names from extends/implements
    source_file: str  # absolute posix path
    body_span: tuple[int, int]  # full declaration span, javadoc included
    body_open: int  # byte offset of '{'
    body_close: int  # byte offset just past the matching '}'
    docstring: str | None
    imports: list[tuple[str, bool, bool]]  # (path, is_static, is_wildcard)
    fields: list[FieldInfo] = field(default_factory=list)
    methods: list[MethodInfo] = field(default_factory=list)

    @property
    def package(self) -> str:
        return ".".join(self.package_path)

    @property
    def is_interface(self) -> bool:
        return self.kind == "interface"

    @property
    def is_enum(self) -> bool:
        return self.kind == "enum"

    @property
    def leaf_name(self) -> str:
        return self.simple_name.rsplit(".", 1)[-1]

    def method(self, signature: str) -> MethodInfo | None:
        """Look up a method by signature, falling back to unique bare name."""
        for m in self.methods:
            if m.signature == signature:
                return m
        if "(" not in signature:
            hits = [m for m in self.methods if m.name == signature]
            if len(hits) == 1:
                return hits[0]
        return None

    def field_named(self, name: str) -> FieldInfo | None:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def member_kind(self, name: str) -> str | None:
        if self.field_named(name) is not None:
            return "field"
        if any(m.name == name for m in self.methods):
            return "method"
        return None


def simple_type_name(type_text: str) -> str:
    """Reduce a raw type to its simple name: drop generics and qualifiers."""
    flat = javasrc.normalize_type_text(type_text)
    suffix = ""
    while flat.endswith("[]"):
        flat = flat[:-2]
        suffix += "[]"
    if "." in flat:
        flat = flat.rsplit(".", 1)[1]
    return flat + suffix


@dataclass
class ProjectIndex:
    source_roots: list[str]
    classes: dict[str, ClassInfo]
    packages: set[str]
    file_hashes: dict[str, str]  # absolute path -> sha256
    warnings: list[str] = field(default_factory=list)
    name_resolution: dict[tuple[str, str], str] = field(default_factory=dict)
    _sources: dict[str, bytes] = field(default_factory=dict, repr=False)

    def sorted_classes(self) -> list[ClassInfo]:
        return [self.classes[q] for q in sorted(self.classes)]

    def lookup(self, name: str) -> ClassInfo | None:
        """Find a class by qualified name, or by unique simple name."""
        if name in self.classes:
            return self.classes[name]
        hits = [
            c
            for c in self.sorted_classes()
            if c.simple_name == name or c.leaf_name == name
        ]
        if len(hits) == 1:
            return hits[0]
        return None

    def file_bytes(self, path: str) -> bytes:
        if path not in self._sources:
            self._sources[path] = Path(path).read_bytes()
        return self._sources[path]

    def invalidate_file(self, path: str) -> None:
        self._sources.pop(path, None)

    def check_fresh(self, path: str) -> None:
        """Raise StaleIndex if the file on disk no longer matches the index."""
        expected = self.file_hashes.get(path)
        p = Path(path)
        if expected is None or not p.is_file():
            raise StaleIndex(f"{path} is not covered by this index")
        if hashlib.sha256(p.read_bytes()).hexdigest() != expected:
            raise StaleIndex(f"{path} changed since the index was built")

    # -- source slicing ----------------------------------------------------

    def class_source(self, cls: ClassInfo) -> str:
        data = self.file_bytes(cls.source_file)
        return data[cls.body_span[0] : cls.body_span[1]].decode("utf-8", errors="replace")

    def method_source(self, cls: ClassInfo, method: MethodInfo) -> str:
        data = self.file_bytes(cls.source_file)
        return data[method.span[0] : method.span[1]].decode("utf-8", errors="replace")

    def method_body_tokens(self, cls: ClassInfo, method: MethodInfo) -> list[javasrc.Token]:
        """Tokens strictly inside the method's braces, file-absolute offsets."""
        data = self.file_bytes(cls.source_file)
        text = data[method.span[0] : method.span[1]]
        tokens = javasrc.tokenize(text)
        depth = 0
        start = end = None
        for i, t in enumerate(tokens):
            if t.text == "{":
                if depth == 0:
                    start = i + 1
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth == 0:
                    end = i
        if start is None or end is None or end < start:
            return []
        base = method.span[0]
        return [
            javasrc.Token(t.kind, t.text, t.start + base, t.end + base)
            for t in tokens[start:end]
        ]

    def class_text_without_method(self, cls: ClassInfo, method: MethodInfo) -> str:
        """The class source with one method's span spliced out, byte-exact."""
        if not any(m.span == method.span and m.name == method.name for m in cls.methods):
            raise MethodNotInClass(f"{method.name} not in {cls.qualified_name}")
        data = self.file_bytes(cls.source_file)
        before = data[cls.body_span[0] : method.span[0]]
        after = data[method.span[1] : cls.body_span[1]]
        return (before + after).decode("utf-8", errors="replace")

    # -- name resolution ---------------------------------------------------

    def resolve_type(self, type_text: str, ctx: ClassInfo) -> str | None:
        """Map a raw type reference to a qualified name within the project.

        Lookup order: self, enclosing/nested, same package, explicit imports,
        wildcard imports. Returns None for primitives, arrays, and anything
        not indexed (JDK types, external libraries).
        """
        flat = javasrc.normalize_type_text(type_text)
        if flat.endswith("[]") or flat in javasrc.PRIMITIVES or not flat:
            return None
        key = (ctx.qualified_name, flat)
        if key in self.name_resolution:
            return self.name_resolution[key]
        resolved = self._resolve_uncached(flat, ctx)
        if resolved is not None:
            self.name_resolution[key] = resolved
        return resolved

    def _resolve_uncached(self, flat: str, ctx: ClassInfo) -> str | None:
        if "." in flat:
            if flat in self.classes:
                return flat
            cand = f"{ctx.package}.{flat}" if ctx.package else flat
            return cand if cand in self.classes else None
        if flat == ctx.leaf_name:
            return ctx.qualified_name
        cand = f"{ctx.qualified_name}.{flat}"
        if cand in self.classes:
            return cand
        cand = f"{ctx.package}.{flat}" if ctx.package else flat
        if cand in self.classes:
            return cand
        for path, is_static, is_wild in ctx.imports:
            if is_static:
                continue
            if not is_wild and path.endswith("." + flat):
                return path if path in self.classes else None
        for path, is_static, is_wild in ctx.imports:
            if is_static or not is_wild:
                continue
            cand = f"{path}.{flat}"
            if cand in self.classes:
                return cand
        return None

    def super_chain(self, cls: ClassInfo) -> list[ClassInfo]:
        """Resolved ancestors (extends + implements), breadth-first, project-local."""
        seen: set[str] = {cls.qualified_name}
        queue = [cls]
        chain: list[ClassInfo] = []
        while queue:
            cur = queue.pop(0)
            for raw in cur.super_types:
                q = self.resolve_type(raw, cur)
                if q is None or q in seen:
                    continue
                seen.add(q)
                sup = self.classes[q]
                chain.append(sup)
                queue.append(sup)
        return chain


def iter_java_files(root: Path) -> list[Path]:
    files: list[Path] = []
    for path in sorted(root.rglob("*.java")):
        if any(part in IGNORED_DIRS for part in path.relative_to(root).parts):
            continue
        files.append(path)
    return files


def build_index(source_roots: str | Path | list[str | Path]) -> ProjectIndex:
    """Parse every Java file under the given roots into a ProjectIndex."""
    if isinstance(source_roots, (str, Path)):
        source_roots = [source_roots]
    roots: list[Path] = []
    for r in source_roots:
        p = Path(r).resolve()
        if not p.is_dir():
            raise IoError(f"not a readable directory: {r}")
        roots.append(p)

    classes: dict[str, ClassInfo] = {}
    hashes: dict[str, str] = {}
    sources: dict[str, bytes] = {}
    warnings: list[str] = []
    for root in roots:
        for path in iter_java_files(root):
            abspath = path.as_posix()
            try:
                data = path.read_bytes()
            except OSError as exc:
                warnings.append(f"unreadable file skipped: {abspath} ({exc})")
                continue
            hashes[abspath] = hashlib.sha256(data).hexdigest()
            sources[abspath] = data
            try:
                parsed = javasrc.parse_file(data)
            except Exception as exc:  # parser is best-effort; never fatal
                warnings.append(f"unparseable file skipped: {abspath} ({exc})")
                continue
            for raw in parsed.types:
                _register_type(classes, raw, parsed, abspath, outer=None)

    if not classes:
        raise EmptyProject(f"no Java classes found under {[str(r) for r in roots]}")

    index = ProjectIndex(
        source_roots=[r.as_posix() for r in roots],
        classes=classes,
        packages={c.package for c in classes.values()},
        file_hashes=hashes,
        warnings=warnings,
    )
    index._sources = sources
    _annotate(index)
    return index


def _register_type(
    classes: dict[str, ClassInfo],
    raw: javasrc.RawType,
    parsed: javasrc.RawFile,
    abspath: str,
    outer: ClassInfo | None,
) -> None:
    if outer is None:
        simple = raw.name
        qname = f"{parsed.package}.{raw.name}" if parsed.package else raw.name
    else:
        if "static" not in raw.modifiers:
            return  # inner (non-static) classes are out of scope
        simple = f"{outer.simple_name}.{raw.name}"
        qname = f"{outer.qualified_name}.{raw.name}"
    info = ClassInfo(
        qualified_name=qname,
        package_path=parsed.package.split(".") if parsed.package else [],
        simple_name=simple,
        kind=raw.kind,
        modifiers=list(raw.modifiers),
        super_types=list(raw.super_types),
        source_file=abspath,
        body_span=raw.span,
        body_open=raw.body_open,
        body_close=raw.body_close,
        docstring=raw.doc,
        imports=list(parsed.imports),
        fields=[
            FieldInfo(
                name=f.name,
                type_text=f.type_text,
                declared_type=f.type_text,  # resolved during annotation
                is_static="static" in f.modifiers,
                modifiers=list(f.modifiers),
                span=f.span,
            )
            for f in raw.fields
        ],
        methods=[
            MethodInfo(
                name=m.name,
                parameters=[ParamInfo(p.name, p.type_text) for p in m.params],
                return_type=m.return_type,
                modifiers=list(m.modifiers),
                annotations=list(m.annotations),
                span=m.span,
                has_body=m.has_body,
                docstring=m.doc,
                is_constructor=m.return_type is None,
            )
            for m in raw.methods
            if m.return_type is not None or m.name == raw.name
        ],
    )
    classes[qname] = info
    for nested in raw.nested:
        _register_type(classes, nested, parsed, abspath, outer=info)


# ---------------------------------------------------------------------------
# Post-parse annotation: predicates and reference extraction


def _annotate(index: ProjectIndex) -> None:
    for cls in index.classes.values():
        for f in cls.fields:
            resolved = index.resolve_type(f.type_text, cls)
            if resolved is not None:
                f.declared_type = resolved
        in_test_tree = _under_test_root(cls.source_file)
        supers = index.super_chain(cls)
        field_names = {f.name for f in cls.fields}
        for m in cls.methods:
            tokens = index.method_body_tokens(cls, m)
            m.is_empty_or_comment_only = m.has_body and len(tokens) == 0
            m.is_test = in_test_tree or bool(set(m.annotations) & TEST_ANNOTATIONS)
            m.is_override = "Override" in m.annotations or _matches_super(m, supers)
            m.is_getter_setter = _is_getter_setter(m, tokens, field_names)
            m.referenced_members, m.uses_this = _referenced_members(
                index, cls, m, tokens
            )


def _under_test_root(path: str) -> bool:
    return "test" in Path(path).parts


def _matches_super(m: MethodInfo, supers: list[ClassInfo]) -> bool:
    for sup in supers:
        for sm in sup.methods:
            if sm.name == m.name and len(sm.parameters) == len(m.parameters):
                return True
    return False


def _is_getter_setter(
    m: MethodInfo, tokens: list[javasrc.Token], field_names: set[str]
) -> bool:
    name_matches = (
        (m.name.startswith("get") or m.name.startswith("set") or m.name.startswith("is"))
        and len(m.name) > 2
    )
    if not name_matches or m.is_constructor or not m.has_body:
        return False
    texts = [t.text for t in tokens]
    # Single statement returning one field: return x; / return this.x;
    if texts[:1] == ["return"]:
        rest = texts[1:]
        if len(rest) == 2 and rest[1] == ";" and rest[0] in field_names:
            return True
        if (
            len(rest) == 4
            and rest[0] == "this"
            and rest[1] == "."
            and rest[2] in field_names
            and rest[3] == ";"
        ):
            return True
        return False
    # Single statement assigning one field: x = v; / this.x = v;
    if len(texts) == 4 and texts[1] == "=" and texts[3] == ";" and texts[0] in field_names:
        return True
    if (
        len(texts) == 6
        and texts[0] == "this"
        and texts[1] == "."
        and texts[2] in field_names
        and texts[3] == "="
        and texts[5] == ";"
    ):
        return True
    return False


def _referenced_members(
    index: ProjectIndex,
    cls: ClassInfo,
    method: MethodInfo,
    tokens: list[javasrc.Token],
) -> tuple[list[tuple[str, str, str]], bool]:
    """Best-effort member references: host members plus typed-variable members."""
    member_names = {f.name for f in cls.fields} | {m.name for m in cls.methods}
    var_types: dict[str, str] = {}
    for p in method.parameters:
        var_types[p.name] = p.type_text
    var_types.update(collect_local_decls(tokens))
    field_types = {f.name: f.type_text for f in cls.fields}

    refs: set[tuple[str, str, str]] = set()
    uses_this = False
    n = len(tokens)
    locals_ = set(var_types)

    def classify(owner: ClassInfo, name: str, is_call: bool) -> None:
        kind = owner.member_kind(name)
        if kind is None:
            kind = "method" if is_call else "field"
        refs.add((kind, owner.qualified_name, name))

    for i, t in enumerate(tokens):
        if t.kind != "IDENT":
            continue
        nxt = tokens[i + 1] if i + 1 < n else None
        prev = tokens[i - 1] if i > 0 else None
        if t.text == "this":
            if nxt is not None and nxt.text == ".":
                after = tokens[i + 2] if i + 2 < n else None
                if after is not None and after.kind == "IDENT":
                    is_call = i + 3 < n and tokens[i + 3].text == "("
                    classify(cls, after.text, is_call)
            else:
                uses_this = True
            continue
        if t.text in javasrc.JAVA_KEYWORDS:
            continue
        if prev is not None and prev.text == ".":
            continue  # handled via its qualifier
        is_call = nxt is not None and nxt.text == "("
        qualifies = nxt is not None and nxt.text == "."
        if qualifies:
            member_tok = tokens[i + 2] if i + 2 < n else None
            if member_tok is None or member_tok.kind != "IDENT":
                continue
            member_call = i + 3 < n and tokens[i + 3].text == "("
            owner_q: str | None = None
            if t.text in var_types:
                owner_q = index.resolve_type(var_types[t.text], cls)
            elif t.text in field_types:
                owner_q = index.resolve_type(field_types[t.text], cls)
                classify(cls, t.text, False)  # the field itself is referenced
            else:
                owner_q = index.resolve_type(t.text, cls)  # static qualifier
            if owner_q is not None and owner_q in index.classes:
                classify(index.classes[owner_q], member_tok.text, member_call)
            continue
        if t.text in locals_:
            continue
        if t.text in member_names:
            classify(cls, t.text, is_call)
    return sorted(refs), uses_this


def collect_local_decls(tokens: list[javasrc.Token]) -> dict[str, str]:
    """Map of local variable name -> declared type text (best-effort).

    Matches `Type name =`, `Type name;`, `Type name :` (for-each), and
    extra declarators after a comma. Type may be generic, qualified, or
    an array.
    """
    decls: dict[str, str] = {}
    i = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.kind == "IDENT" and (
            t.text in javasrc.PRIMITIVES or (t.text[0].isupper() and t.text not in javasrc.JAVA_KEYWORDS)
        ):
            type_parts = [t.text]
            j = i + 1
            depth = 0
            while j < n:
                tj = tokens[j]
                if tj.text == "<":
                    depth += 1
                    type_parts.append(tj.text)
                elif tj.text == ">":
                    depth -= 1
                    type_parts.append(tj.text)
                elif depth == 0 and tj.text == "[" and j + 1 < n and tokens[j + 1].text == "]":
                    type_parts.append("[]")
                    j += 1
                elif depth == 0 and tj.text == "." and j + 1 < n and tokens[j + 1].kind == "IDENT":
                    type_parts.append("." + tokens[j + 1].text)
                    j += 1
                elif depth == 0:
                    break
                else:
                    type_parts.append(tj.text)
                j += 1
            if (
                j < n
                and tokens[j].kind == "IDENT"
                and tokens[j].text not in javasrc.JAVA_KEYWORDS
            ):
                after = tokens[j + 1] if j + 1 < n else None
                if after is not None and after.text in ("=", ";", ":"):
                    name = tokens[j].text
                    type_text = "".join(type_parts)
                    decls[name] = type_text
                    k = j + 1
                    depth2 = 0
                    while k < n:
                        tk = tokens[k]
                        if tk.text in ("(", "[", "{"):
                            depth2 += 1
                        elif tk.text in (")", "]", "}"):
                            depth2 -= 1
                        elif depth2 == 0 and tk.text == ";":
                            break
                        elif (
                            depth2 == 0
                            and tk.text == ","
                            and k + 1 < n
                            and tokens[k + 1].kind == "IDENT"
                        ):
                            nxt2 = tokens[k + 2] if k + 2 < n else None
                            if nxt2 is not None and nxt2.text in ("=", ",", ";"):
                                decls[tokens[k + 1].text] = type_text
                        k += 1
                    i = j
        i += 1
    return decls


# ---------------------------------------------------------------------------
# Persistence


def save_index(index: ProjectIndex, path: str | Path) -> None:
    Path(path).write_text(serialize_index(index))


def serialize_index(index: ProjectIndex) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "source_roots": list(index.source_roots),
        "packages": sorted(index.packages),
        "files": dict(sorted(index.file_hashes.items())),
        "warnings": list(index.warnings),
        "name_resolution": {
            f"{ctx}|{name}": q
            for (ctx, name), q in sorted(index.name_resolution.items())
        },
        "classes": [_class_to_doc(index.classes[q]) for q in sorted(index.classes)],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_index(path: str | Path) -> ProjectIndex:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoError(f"cannot read index file {path}: {exc}") from exc
    if doc.get("schema") != SCHEMA_VERSION:
        raise IoError(
            f"index schema {doc.get('schema')!r} not supported (want {SCHEMA_VERSION})"
        )
    classes = {c["qualified_name"]: _class_from_doc(c) for c in doc["classes"]}
    name_resolution: dict[tuple[str, str], str] = {}
    for key, q in doc.get("name_resolution", {}).items():
        ctx, _, name = key.partition("|")
        name_resolution[(ctx, name)] = q
    return ProjectIndex(
        source_roots=list(doc["source_roots"]),
        classes=classes,
        packages=set(doc["packages"]),
        file_hashes=dict(doc["files"]),
        warnings=list(doc.get("warnings", [])),
        name_resolution=name_resolution,
    )


def _class_to_doc(cls: ClassInfo) -> dict:
    return {
        "qualified_name": cls.qualified_name,
        "package_path": cls.package_path,
        "simple_name": cls.simple_name,
        "kind": cls.kind,
        "modifiers": cls.modifiers,
        "super_types": cls.super_types,
        "source_file": cls.source_file,
        "body_span": list(cls.body_span),
        "body_open": cls.body_open,
        "body_close": cls.body_close,
        "docstring": cls.docstring,
        "is_interface": cls.is_interface,
        "imports": [list(i) for i in cls.imports],
        "fields": [
            {
                "name": f.name,
                "type_text": f.type_text,
                "declared_type": f.declared_type,
                "is_static": f.is_static,
                "modifiers": f.modifiers,
                "span": list(f.span),
            }
            for f in cls.fields
        ],
        "methods": [
            {
                "name": m.name,
                "signature": m.full_signature,
                "parameters": [
                    {"name": p.name, "type_text": p.type_text} for p in m.parameters
                ],
                "return_type": m.return_type,
                "modifiers": m.modifiers,
                "annotations": m.annotations,
                "body_span": list(m.span),
                "has_body": m.has_body,
                "docstring": m.docstring,
                "is_static": m.is_static,
                "is_constructor": m.is_constructor,
                "is_override": m.is_override,
                "is_getter_setter": m.is_getter_setter,
                "is_test": m.is_test,
                "is_empty_or_comment_only": m.is_empty_or_comment_only,
                "referenced_members": [list(r) for r in m.referenced_members],
                "uses_this": m.uses_this,
            }
            for m in sorted(cls.methods, key=lambda m: m.span[0])
        ],
    }


def _class_from_doc(doc: dict) -> ClassInfo:
    return ClassInfo(
        qualified_name=doc["qualified_name"],
        package_path=list(doc["package_path"]),
        simple_name=doc["simple_name"],
        kind=doc["kind"],
        modifiers=list(doc["modifiers"]),
        super_types=list(doc["super_types"]),
        source_file=doc["source_file"],
        body_span=tuple(doc["body_span"]),
        body_open=doc["body_open"],
        body_close=doc["body_close"],
        docstring=doc["docstring"],
        imports=[tuple(i) for i in doc["imports"]],
        fields=[
            FieldInfo(
                name=f["name"],
                type_text=f["type_text"],
                declared_type=f["declared_type"],
                is_static=f["is_static"],
                modifiers=list(f["modifiers"]),
                span=tuple(f["span"]),
            )
            for f in doc["fields"]
        ],
        methods=[
            MethodInfo(
                name=m["name"],
                parameters=[ParamInfo(p["name"], p["type_text"]) for p in m["parameters"]],
                return_type=m["return_type"],
                modifiers=list(m["modifiers"]),
                annotations=list(m["annotations"]),
                span=tuple(m["body_span"]),
                has_body=m["has_body"],
                docstring=m["docstring"],
                is_constructor=m["is_constructor"],
                is_override=m["is_override"],
                is_getter_setter=m["is_getter_setter"],
                is_test=m["is_test"],
                is_empty_or_comment_only=m["is_empty_or_comment_only"],
                referenced_members=[tuple(r) for r in m["referenced_members"]],
                uses_this=m.get("uses_this", False),
            )
            for m in doc["methods"]
        ],
    )
