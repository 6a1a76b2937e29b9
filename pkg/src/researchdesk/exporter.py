"""Export bundles: RO-Crate provenance archives and LaTeX/BibTeX drafts.

Both exports are pure functions of an :class:`ExportSelection` (plus the
crate's author/license inputs), byte-stable across runs: entity order is
fixed, archive entry timestamps come from the manifest, and cite keys are
derived deterministically.

Ontology IRIs used for section typing are listed in docs/export.md.
"""

from __future__ import annotations

import io
import json
import re
import zipfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from .errors import ContractViolation, NoPaperAssetsError, UnknownLicenseError
from .model import Asset, BibliographyEntry, PAPER_ROLES, parse_bibliography
from .store import ExportSelection, asset_filename, slugify

RO_CRATE_CONTEXT = "https://w3id.org/ro/crate/1.1/context"
RO_CRATE_PROFILE = "https://w3id.org/ro/crate/1.1"

DOCO_TITLE = "http://purl.org/spar/doco/Title"
DOCO_SECTION = "http://purl.org/spar/doco/Section"
DEO_RELATED_WORK = "http://purl.org/spar/deo/RelatedWork"

# role -> ontology class; roles outside this table export as plain File
SECTION_TYPES = {
    "paper-title": DOCO_TITLE,
    "paper-related-work": DEO_RELATED_WORK,
    "paper-body": DOCO_SECTION,
}

LICENSE_IRIS = {
    "CC-BY-4.0": "https://creativecommons.org/licenses/by/4.0/",
    "CC0-1.0": "https://creativecommons.org/publicdomain/zero/1.0/",
    "proprietary-all-rights-reserved": "#license-proprietary",
}

LICENSE_NAMES = {
    "CC-BY-4.0": "Creative Commons Attribution 4.0 International",
    "CC0-1.0": "CC0 1.0 Universal Public Domain Dedication",
    "proprietary-all-rights-reserved": "All rights reserved",
}

# zip entries cannot carry timestamps before 1980
_EPOCH = datetime(1980, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class CrateFile:
    path: str
    data: bytes


@dataclass(frozen=True)
class CrateManifest:
    jsonld: dict
    files: tuple[CrateFile, ...]
    exported_at: datetime

    def metadata_bytes(self) -> bytes:
        return (
            json.dumps(self.jsonld, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        ).encode("utf-8")


@dataclass(frozen=True)
class LatexExport:
    tex_document: str
    bib_database: str


def _iso(moment: datetime) -> str:
    return moment.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _encoding_format(asset: Asset) -> str:
    return "text/plain" if asset.kind == "text" else "application/json"


def _unique_paths(assets) -> list[str]:
    paths = []
    seen: dict[str, int] = {}
    for asset in assets:
        path = asset_filename(asset)
        count = seen.get(path, 0)
        seen[path] = count + 1
        if count:
            stem, dot, ext = path.rpartition(".")
            path = f"{stem}-{count + 1}{dot}{ext}"
        paths.append(path)
    return paths


def build_crate(
    selection: ExportSelection,
    author_name: str,
    license_id: str,
    exported_at: Optional[datetime] = None,
) -> CrateManifest:
    """RO-Crate 1.1 manifest: descriptor + root Dataset + one File per asset,
    with Person/SoftwareApplication authorship from the provenance records."""
    if not author_name or not author_name.strip():
        raise ContractViolation("author name must be non-empty")
    if license_id not in LICENSE_IRIS:
        raise UnknownLicenseError(
            f"license {license_id!r} not in allow-list {sorted(LICENSE_IRIS)}"
        )
    if exported_at is None:
        stamps = [a.provenance.created_at for a in selection.assets]
        exported_at = max(stamps) if stamps else _EPOCH
    license_iri = LICENSE_IRIS[license_id]
    crate_author_iri = f"#person-{slugify(author_name)}"

    paths = _unique_paths(selection.assets)
    persons: dict[str, str] = {crate_author_iri: author_name.strip()}
    applications: dict[str, str] = {}
    extra_license_ids: list[str] = []

    file_entities = []
    for asset, path in zip(selection.assets, paths):
        prov = asset.provenance
        if prov.creator_kind == "assistant":
            author_iri = f"#assistant-{slugify(prov.assistant_id)}"
            applications.setdefault(author_iri, prov.assistant_id)
        elif prov.author_name:
            author_iri = f"#person-{slugify(prov.author_name)}"
            persons.setdefault(author_iri, prov.author_name)
        else:
            author_iri = crate_author_iri
        entity = {
            "@id": path,
            "@type": ["File", SECTION_TYPES[asset.role]]
            if asset.role in SECTION_TYPES
            else "File",
            "name": asset.name,
            "encodingFormat": _encoding_format(asset),
            "dateCreated": _iso(prov.created_at),
            "author": {"@id": author_iri},
            "version": asset.version,
        }
        if prov.license and prov.license in LICENSE_IRIS:
            entity["license"] = {"@id": LICENSE_IRIS[prov.license]}
            extra_license_ids.append(prov.license)
        elif prov.license:
            entity["license"] = prov.license
        file_entities.append(entity)

    graph = [
        {
            "@id": "ro-crate-metadata.json",
            "@type": "CreativeWork",
            "conformsTo": {"@id": RO_CRATE_PROFILE},
            "about": {"@id": "./"},
        },
        {
            "@id": "./",
            "@type": "Dataset",
            "name": "Research assets with provenance",
            "description": "Assets generated during an assisted research project.",
            "datePublished": _iso(exported_at),
            "author": {"@id": crate_author_iri},
            "license": {"@id": license_iri},
            "hasPart": [{"@id": path} for path in paths],
        },
        {
            "@id": RO_CRATE_PROFILE,
            "@type": "CreativeWork",
            "name": "RO-Crate Metadata Specification",
            "version": "1.1",
        },
    ]
    for lic in sorted({license_id, *extra_license_ids}):
        graph.append(
            {
                "@id": LICENSE_IRIS[lic],
                "@type": "CreativeWork",
                "name": LICENSE_NAMES[lic],
                "identifier": lic,
            }
        )
    graph.extend(file_entities)
    for iri in sorted(persons):
        graph.append({"@id": iri, "@type": "Person", "name": persons[iri]})
    for iri in sorted(applications):
        graph.append(
            {
                "@id": iri,
                "@type": "SoftwareApplication",
                "name": f"Assistant: {applications[iri]}",
                "identifier": applications[iri],
            }
        )

    jsonld = {"@context": RO_CRATE_CONTEXT, "@graph": graph}
    files = tuple(
        CrateFile(path=path, data=asset.content.encode("utf-8"))
        for asset, path in zip(selection.assets, paths)
    )
    return CrateManifest(jsonld=jsonld, files=files, exported_at=exported_at)


def package_archive(manifest: CrateManifest) -> bytes:
    """Zip the crate; all entry timestamps equal the manifest's export time, so
    identical manifests produce byte-identical archives."""
    stamp = max(manifest.exported_at.astimezone(timezone.utc), _EPOCH).timetuple()[:6]
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        entries = [CrateFile("ro-crate-metadata.json", manifest.metadata_bytes())]
        entries.extend(manifest.files)
        for entry in entries:
            info = zipfile.ZipInfo(entry.path, date_time=stamp)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            archive.writestr(info, entry.data)
    return buffer.getvalue()


# -- LaTeX / BibTeX ----------------------------------------------------------

_SIMPLE_ESCAPES = {"&": r"\&", "%": r"\%", "$": r"\$", "#": r"\#", "_": r"\_"}


def latex_escape(text: str) -> str:
    out = text.replace("\\", "\x00")
    out = out.replace("{", r"\{").replace("}", r"\}")
    for ch, rep in _SIMPLE_ESCAPES.items():
        out = out.replace(ch, rep)
    out = out.replace("~", r"\textasciitilde{}").replace("^", r"\textasciicircum{}")
    return out.replace("\x00", r"\textbackslash{}")


_ALNUM = re.compile(r"[^a-z0-9]+")


def _key_word(text: str) -> str:
    for token in text.split():
        cleaned = _ALNUM.sub("", token.lower())
        if cleaned:
            return cleaned
    return ""


def make_cite_keys(entries: list[BibliographyEntry]) -> list[str]:
    """<firstAuthorFamily><year><firstTitleWord>, suffixed a, b, c on collision."""
    keys = []
    used: dict[str, int] = {}
    for entry in entries:
        family = _key_word(entry.authors[0].family) if entry.authors else "anon"
        year = str(entry.year) if entry.year else ""
        base = f"{family or 'anon'}{year}{_key_word(entry.title)}" or "ref"
        count = used.get(base, 0)
        used[base] = count + 1
        keys.append(base if count == 0 else base + _suffix(count))
    return keys


def _suffix(count: int) -> str:
    # 1 -> a, 2 -> b, ... 27 -> aa
    letters = ""
    while count > 0:
        count, rem = divmod(count - 1, 26)
        letters = chr(ord("a") + rem) + letters
    return letters


def _bib_record(key: str, entry: BibliographyEntry) -> str:
    fields = [("title", latex_escape(entry.title))]
    if entry.authors:
        fields.append(
            (
                "author",
                " and ".join(
                    f"{latex_escape(a.family)}, {latex_escape(a.given)}".rstrip(", ")
                    for a in entry.authors
                ),
            )
        )
    if entry.year:
        fields.append(("year", str(entry.year)))
    if entry.venue:
        fields.append(("journal", latex_escape(entry.venue)))
    if entry.doi:
        fields.append(("doi", entry.doi))
    if entry.url:
        fields.append(("url", entry.url))
    body = ",\n".join(f"  {name} = {{{value}}}" for name, value in fields)
    return f"@article{{{key},\n{body}\n}}\n"


def export_latex(selection: ExportSelection) -> LatexExport:
    """Draft document from the paper-* assets plus a BibTeX database from any
    bibliography assets in the selection."""
    paper_assets = {
        role: sorted(
            (a for a in selection.assets if a.role == role),
            key=lambda a: (a.version, a.name),
        )
        for role in PAPER_ROLES
    }
    if not any(paper_assets.values()):
        raise NoPaperAssetsError("selection holds no paper-title/related-work/body asset")

    bib_entries: list[BibliographyEntry] = []
    for asset in selection.assets:
        if asset.kind == "bibliography":
            bib_entries.extend(parse_bibliography(asset.content))
    keys = make_cite_keys(bib_entries)

    lines = [
        "\\documentclass{article}",
        "\\usepackage[utf8]{inputenc}",
        "",
    ]
    titles = paper_assets["paper-title"]
    if titles:
        lines.append(f"\\title{{{latex_escape(titles[-1].content.strip())}}}")
    lines += ["", "\\begin{document}", ""]
    if titles:
        lines += ["\\maketitle", ""]
    for asset in paper_assets["paper-related-work"]:
        lines += ["\\section{Related Work}", "", latex_escape(asset.content), ""]
    for asset in paper_assets["paper-body"]:
        lines += [f"\\section{{{latex_escape(asset.name)}}}", "", latex_escape(asset.content), ""]
    if bib_entries:
        lines += ["\\bibliographystyle{plain}", "\\bibliography{refs}", ""]
    lines.append("\\end{document}")

    bib = "\n".join(_bib_record(key, entry) for key, entry in zip(keys, bib_entries))
    return LatexExport(tex_document="\n".join(lines) + "\n", bib_database=bib)
