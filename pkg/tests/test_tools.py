import json
import random
import string

import pytest

from researchdesk.errors import (
    ContractViolation,
    FetchFailedError,
    InvalidOrcidError,
    NotFoundError,
    SchemaViolationError,
    ToolNotAllowedError,
    UnknownToolError,
    UpstreamUnavailableError,
)
from researchdesk.model import validate_entry
from researchdesk.tools import (
    FixtureTransport,
    ToolContext,
    ToolSettings,
    build_library,
    builtin_fixtures_dir,
)
from researchdesk.tools import clients
from researchdesk.tools.clients import (
    MAX_TEXT_CHARS,
    orcid_checksum_ok,
    split_person_name,
    validate_orcid,
)

ALL_TOOLS = frozenset(
    {"crossref", "orcid", "pdf-url", "unpaywall", "orkg-ask", "semantic-scholar"}
)


@pytest.fixture(scope="module")
def transport():
    return FixtureTransport(builtin_fixtures_dir())


@pytest.fixture(scope="module")
def settings():
    return ToolSettings()


@pytest.fixture(scope="module")
def library(transport, settings):
    return build_library(transport, settings)


def ctx(allowed=ALL_TOOLS):
    return ToolContext(allowed_tool_ids=frozenset(allowed))


class TestDispatch:
    def test_crossref_ok(self, library):
        result = library.dispatch("crossref", '{"doi": "10.3233/DS-210053"}', ctx())
        assert result.status == "ok"
        entry = result.structured["entry"]
        assert entry["doi"] == "10.3233/ds-210053"
        assert entry["title"]

    def test_missing_required_property_named(self, library):
        with pytest.raises(SchemaViolationError, match="doi"):
            library.dispatch("crossref", "{}", ctx())

    def test_tool_not_allowed_before_validation(self, library):
        with pytest.raises(ToolNotAllowedError):
            library.dispatch(
                "semantic-scholar", '{"query": "x"}', ctx(allowed={"crossref"})
            )
        # even syntactically broken arguments are refused on the allowed check
        with pytest.raises(ToolNotAllowedError):
            library.dispatch("semantic-scholar", "not json", ctx(allowed={"crossref"}))

    def test_unknown_tool(self, library):
        with pytest.raises(UnknownToolError):
            library.dispatch("nonexistent", "{}", ctx(allowed={"nonexistent"}))

    def test_arguments_must_be_object(self, library):
        with pytest.raises(SchemaViolationError):
            library.dispatch("crossref", "[1, 2]", ctx())
        with pytest.raises(SchemaViolationError):
            library.dispatch("crossref", "{broken", ctx())

    def test_negative_page_schema_violation(self, library):
        with pytest.raises(SchemaViolationError, match="page"):
            library.dispatch(
                "semantic-scholar", '{"query": "x", "page": -1}', ctx()
            )

    def test_downstream_error_becomes_error_result(self, library):
        result = library.dispatch(
            "crossref", '{"doi": "10.99999/does-not-exist"}', ctx()
        )
        assert result.status == "error"
        assert "not-found" in result.error_message

    def test_search_results_carry_ui_component(self, library):
        result = library.dispatch(
            "orkg-ask", '{"query": "knowledge graphs question answering"}', ctx()
        )
        assert result.status == "ok"
        assert result.ui_component_id == "literature-search"
        assert result.structured["hasMore"] is True


class TestCrossref:
    def test_lookup_echoes_doi_with_title(self, transport, settings):
        entry = clients.crossref_lookup("10.3233/ds-210053", transport, settings)
        assert entry.doi == "10.3233/ds-210053"
        assert entry.title
        assert entry.source_tool == "crossref"
        assert entry.year == 2022

    def test_unknown_doi_not_found(self, transport, settings):
        with pytest.raises(NotFoundError):
            clients.crossref_lookup("10.99999/does-not-exist", transport, settings)

    def test_unnormalized_rejected_before_network(self, settings):
        class Exploding:
            def get(self, *a, **k):
                raise AssertionError("network touched")

        with pytest.raises(ContractViolation):
            clients.crossref_lookup("10.3233/DS-210053", Exploding(), settings)


def iso7064_check_digit(base15: str) -> str:
    """Independent oracle: ISO 7064 11,2 as the published step formula."""
    total = 0
    for digit in base15:
        total = (total + int(digit)) * 2
    result = (12 - total % 11) % 11
    return "X" if result == 10 else str(result)


class TestOrcid:
    def test_paper_orcid_passes_validation(self):
        assert validate_orcid("0000-0001-9924-9153") == "0000-0001-9924-9153"

    def test_checksum_oracle_agreement(self):
        rng = random.Random(7)
        for _ in range(50):
            base = "".join(rng.choice(string.digits) for _ in range(15))
            check = iso7064_check_digit(base)
            candidate = f"{base[0:4]}-{base[4:8]}-{base[8:12]}-{base[12:15]}{check}"
            assert orcid_checksum_ok(candidate), candidate

    def test_wrong_check_digit_rejected(self):
        assert iso7064_check_digit("000000019924915") == "3"
        with pytest.raises(InvalidOrcidError):
            validate_orcid("0000-0001-9924-9150")

    def test_pattern_rejected(self):
        with pytest.raises(InvalidOrcidError):
            validate_orcid("not-an-orcid")

    def test_valid_but_unknown_not_found(self, transport, settings):
        with pytest.raises(NotFoundError):
            clients.orcid_works("0000-0002-1825-0097", transport, settings)

    def test_works_listed_untitled_dropped(self, transport, settings):
        works = clients.orcid_works("0000-0001-9924-9153", transport, settings)
        assert len(works) == 3  # fixture holds 4 groups, one without a title
        assert all(w.title for w in works)
        assert all(w.source_tool == "orcid" for w in works)


class TestUnpaywall:
    def test_open_access_pdf_url_absolute(self, transport, settings):
        info = clients.unpaywall_lookup("10.3233/ds-210053", transport, settings)
        assert info.is_open_access
        assert info.pdf_url.startswith("https://")

    def test_closed_access(self, transport, settings):
        info = clients.unpaywall_lookup(
            "10.1016/j.artint.2021.103644", transport, settings
        )
        assert not info.is_open_access
        assert info.pdf_url is None

    def test_malformed_doi_precondition(self, transport, settings):
        from researchdesk.errors import MalformedDoiError

        with pytest.raises(MalformedDoiError):
            clients.unpaywall_lookup("DS-210053", transport, settings)
        with pytest.raises(ContractViolation):
            clients.unpaywall_lookup("10.3233/DS-210053", transport, settings)


class TestFetchDocument:
    def test_plain_text_passthrough(self, transport, settings):
        doc = clients.fetch_document("https://files.example.org/hello.txt", transport, settings)
        assert doc.text == "hello" and doc.truncated is False

    def test_truncation_at_cap(self, transport, settings):
        doc = clients.fetch_document("https://files.example.org/big.txt", transport, settings)
        assert doc.truncated is True
        assert len(doc.text) == MAX_TEXT_CHARS

    def test_404_fetch_failed(self, transport, settings):
        with pytest.raises(FetchFailedError):
            clients.fetch_document("https://files.example.org/missing.txt", transport, settings)

    def test_html_tags_stripped(self, transport, settings):
        doc = clients.fetch_document("https://files.example.org/page.html", transport, settings)
        assert "<" not in doc.text
        assert "Knowledge graphs & LLMs." in doc.text
        assert "alert" not in doc.text

    def test_pdf_text_extracted(self, transport, settings):
        doc = clients.fetch_document("https://files.example.org/paper.pdf", transport, settings)
        assert "provenance metadata" in doc.text

    def test_relative_url_rejected(self, transport, settings):
        with pytest.raises(ContractViolation):
            clients.fetch_document("ftp://files.example.org/x", transport, settings)


class TestSearch:
    def test_ask_first_page(self, transport, settings):
        results = clients.ask_search(
            "knowledge graphs question answering", 0, transport, settings
        )
        assert len(results.entries) == 10
        assert results.has_more is True
        assert all(e.source_tool == "orkg-ask" for e in results.entries)

    def test_ask_last_page_arithmetic(self, transport, settings):
        results = clients.ask_search(
            "knowledge graphs question answering", 1, transport, settings
        )
        assert len(results.entries) == 2
        assert results.has_more is False

    def test_ask_empty_is_not_error(self, transport, settings):
        results = clients.ask_search(
            "hopeless query with no matches", 0, transport, settings
        )
        assert results.entries == () and results.has_more is False

    def test_s2_titles_non_empty(self, transport, settings):
        results = clients.s2_search("knowledge graph embeddings", 0, transport, settings)
        assert results.entries
        assert all(e.title for e in results.entries)
        assert all(e.source_tool == "semantic-scholar" for e in results.entries)

    def test_s2_empty(self, transport, settings):
        results = clients.s2_search("hopeless query with no matches", 0, transport, settings)
        assert results.entries == ()

    def test_all_fixture_results_satisfy_entry_invariants(self, transport, settings):
        pools = [
            clients.ask_search("knowledge graphs question answering", 0, transport, settings),
            clients.ask_search("knowledge graphs question answering", 1, transport, settings),
            clients.s2_search("knowledge graph embeddings", 0, transport, settings),
        ]
        for results in pools:
            for entry in results.entries:
                assert validate_entry(entry) == []

    def test_unrecorded_query_surfaces_upstream_error(self, transport, settings):
        with pytest.raises(UpstreamUnavailableError):
            clients.ask_search("query nobody recorded", 0, transport, settings)

    def test_split_person_name(self):
        assert split_person_name("Allard Oelen").family == "Oelen"
        assert split_person_name("Allard Oelen").given == "Allard"
        assert split_person_name("Cher").family == "Cher"


def random_json_doc(rng: random.Random):
    """Small random JSON value; biased toward objects with junk keys/types."""
    choice = rng.random()
    if choice < 0.45:
        return {
            rng.choice(["doi", "orcidId", "url", "query", "page", "junk", ""]):
                random_json_doc(rng)
            for _ in range(rng.randint(0, 3))
        }
    if choice < 0.6:
        return [random_json_doc(rng) for _ in range(rng.randint(0, 3))]
    if choice < 0.7:
        return rng.randint(-5, 5)
    if choice < 0.8:
        return rng.random()
    if choice < 0.9:
        return rng.choice([True, False, None])
    return "".join(rng.choice(string.printable[:70]) for _ in range(rng.randint(0, 8)))


class TestDispatchSafety:
    def test_execution_never_fires_on_invalid_input(self, transport, settings):
        library = build_library(transport, settings)
        fired: list[tuple[str, dict]] = []
        real = dict(library.executors)

        def spy(tool_id):
            def wrapped(args, context):
                fired.append((tool_id, args))
                return real[tool_id](args, context)

            return wrapped

        library.executors = {t: spy(t) for t in library.executors}
        rng = random.Random(42)
        from jsonschema import Draft7Validator

        for _ in range(300):
            tool_id = rng.choice(sorted(ALL_TOOLS))
            doc = random_json_doc(rng)
            schema_ok = isinstance(doc, dict) and Draft7Validator(
                library.descriptors[tool_id].input_schema
            ).is_valid(doc)
            fired.clear()
            try:
                library.dispatch(tool_id, json.dumps(doc), ctx())
            except SchemaViolationError:
                assert not schema_ok
                assert fired == []
            else:
                assert schema_ok
                assert len(fired) == 1

    def test_out_of_set_tools_always_refused(self, transport, settings):
        library = build_library(transport, settings)
        rng = random.Random(43)
        for _ in range(200):
            allowed = frozenset(rng.sample(sorted(ALL_TOOLS), rng.randint(0, 3)))
            tool_id = rng.choice(sorted(ALL_TOOLS - allowed) + ["bogus", "x"])
            with pytest.raises(ToolNotAllowedError):
                library.dispatch(tool_id, "{}", ToolContext(allowed_tool_ids=allowed))
