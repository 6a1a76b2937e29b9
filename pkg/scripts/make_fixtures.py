"""Regenerate the recorded tool fixtures under src/researchdesk/tools/fixtures/.

Run from the repo root: python scripts/make_fixtures.py
"""

import base64
import io
import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "src/researchdesk/tools/fixtures"


def write(name, record):
    FIXTURES.mkdir(parents=True, exist_ok=True)
    path = FIXTURES / f"{name}.json"
    path.write_text(json.dumps(record, indent=2, ensure_ascii=False) + "\n", "utf-8")
    print("wrote", path)


def crossref_fixtures():
    message = {
        "DOI": "10.3233/ds-210053",
        "title": ["Packaging research artefacts with RO-Crate"],
        "author": [
            {"given": "Stian", "family": "Soiland-Reyes", "sequence": "first"},
            {"given": "Peter", "family": "Sefton", "sequence": "additional"},
            {"given": "Mercè", "family": "Crosas", "sequence": "additional"},
            {"given": "Leyla Jael", "family": "Castro", "sequence": "additional"},
            {"given": "Frederik", "family": "Coppens", "sequence": "additional"},
            {"given": "José M.", "family": "Fernández", "sequence": "additional"},
            {"given": "Daniel", "family": "Garijo", "sequence": "additional"},
            {"given": "Paul", "family": "Groth", "sequence": "additional"},
        ],
        "issued": {"date-parts": [[2022, 7, 5]]},
        "container-title": ["Data Science"],
        "volume": "5",
        "issue": "2",
        "page": "97-138",
        "publisher": "IOS Press",
        "type": "journal-article",
        "URL": "http://dx.doi.org/10.3233/DS-210053",
    }
    write(
        "crossref_rocrate",
        {
            "request": {
                "method": "GET",
                "url": "https://api.crossref.org/works/10.3233/ds-210053",
            },
            "response": {
                "status": 200,
                "contentType": "application/json",
                "bodyJson": {"status": "ok", "message-type": "work", "message": message},
            },
        },
    )
    write(
        "crossref_unknown",
        {
            "request": {
                "method": "GET",
                "url": "https://api.crossref.org/works/10.99999/does-not-exist",
            },
            "response": {
                "status": 404,
                "contentType": "text/plain",
                "bodyText": "Resource not found.",
            },
        },
    )


def orcid_fixtures():
    def work(title, year, journal, doi, put_code):
        return {
            "work-summary": [
                {
                    "put-code": put_code,
                    "title": {"title": {"value": title}},
                    "publication-date": {"year": {"value": str(year)}},
                    "journal-title": {"value": journal} if journal else None,
                    "external-ids": {
                        "external-id": [
                            {
                                "external-id-type": "doi",
                                "external-id-value": doi,
                                "external-id-relationship": "self",
                            }
                        ]
                        if doi
                        else []
                    },
                    "type": "journal-article",
                    "url": None,
                }
            ]
        }

    groups = [
        work(
            "Generate FAIR Literature Surveys with Scholarly Knowledge Graphs",
            2020,
            "Proceedings of the ACM/IEEE Joint Conference on Digital Libraries",
            "10.1145/3383583.3398520",
            101,
        ),
        work(
            "Creating and Validating a Scholarly Knowledge Graph Using Natural Language Processing and Microtask Crowdsourcing",
            2021,
            "International Journal on Digital Libraries",
            "10.1007/s00799-021-00318-7",
            102,
        ),
        work(
            "Comparing Research Contributions in a Scholarly Knowledge Graph",
            2019,
            "CEUR Workshop Proceedings",
            None,
            103,
        ),
        # record without a title: must be dropped by the client
        {
            "work-summary": [
                {
                    "put-code": 104,
                    "title": None,
                    "publication-date": None,
                    "external-ids": {"external-id": []},
                }
            ]
        },
    ]
    write(
        "orcid_works",
        {
            "request": {
                "method": "GET",
                "url": "https://pub.orcid.org/v3.0/0000-0001-9924-9153/works",
            },
            "response": {
                "status": 200,
                "contentType": "application/json",
                "bodyJson": {"group": groups, "path": "/0000-0001-9924-9153/works"},
            },
        },
    )
    write(
        "orcid_unknown",
        {
            "request": {
                "method": "GET",
                "url": "https://pub.orcid.org/v3.0/0000-0002-1825-0097/works",
            },
            "response": {
                "status": 404,
                "contentType": "application/json",
                "bodyJson": {
                    "response-code": 404,
                    "developer-message": "404 Not Found: The resource was not found.",
                },
            },
        },
    )


def unpaywall_fixtures():
    write(
        "unpaywall_open",
        {
            "request": {
                "method": "GET",
                "url": "https://api.unpaywall.org/v2/10.3233/ds-210053",
            },
            "response": {
                "status": 200,
                "contentType": "application/json",
                "bodyJson": {
                    "doi": "10.3233/ds-210053",
                    "is_oa": True,
                    "oa_status": "gold",
                    "best_oa_location": {
                        "url_for_pdf": "https://content.iospress.com/download/data-science/ds210053?id=data-science%2Fds210053",
                        "url": "https://doi.org/10.3233/ds-210053",
                        "license": "cc-by",
                        "version": "publishedVersion",
                    },
                },
            },
        },
    )
    write(
        "unpaywall_closed",
        {
            "request": {
                "method": "GET",
                "url": "https://api.unpaywall.org/v2/10.1016/j.artint.2021.103644",
            },
            "response": {
                "status": 200,
                "contentType": "application/json",
                "bodyJson": {
                    "doi": "10.1016/j.artint.2021.103644",
                    "is_oa": False,
                    "oa_status": "closed",
                    "best_oa_location": None,
                },
            },
        },
    )


ASK_ITEMS = [
    (
        "Introduction to neural network-based question answering over knowledge graphs",
        ["Nilesh Chakraborty", "Denis Lukovnikov", "Gaurav Maheshwari"],
        2021,
        "WIREs Data Mining and Knowledge Discovery",
        "10.1002/widm.1389",
    ),
    (
        "Core techniques of question answering systems over knowledge bases: a survey",
        ["Dennis Diefenbach", "Vanessa Lopez", "Kamal Singh", "Pierre Maret"],
        2018,
        "Knowledge and Information Systems",
        "10.1007/s10115-017-1100-y",
    ),
    (
        "Survey on challenges of Question Answering in the Semantic Web",
        ["Konrad Höffner", "Sebastian Walter", "Edgard Marx"],
        2017,
        "Semantic Web",
        "10.3233/sw-160247",
    ),
    (
        "Knowledge graph embedding based question answering",
        ["Xiao Huang", "Jingyuan Zhang", "Dingcheng Li", "Ping Li"],
        2019,
        "Proceedings of the Twelfth ACM International Conference on Web Search and Data Mining",
        "10.1145/3289600.3290956",
    ),
    (
        "QALD-9-plus: A multilingual dataset for question answering over DBpedia and Wikidata",
        ["Aleksandr Perevalov", "Dennis Diefenbach", "Ricardo Usbeck"],
        2022,
        "IEEE International Conference on Semantic Computing",
        "10.1109/icsc52841.2022.00045",
    ),
    (
        "Question answering over curated and open web sources",
        ["Rishiraj Saha Roy", "Avishek Anand"],
        2020,
        "Proceedings of the 43rd International ACM SIGIR Conference",
        "10.1145/3397271.3401421",
    ),
    (
        "Template-based question answering over RDF data",
        ["Christina Unger", "Lorenz Bühmann", "Jens Lehmann"],
        2012,
        "Proceedings of the 21st International Conference on World Wide Web",
        "10.1145/2187836.2187923",
    ),
    (
        "Complex temporal question answering on knowledge graphs",
        ["Zhen Jia", "Soumajit Pramanik", "Rishiraj Saha Roy"],
        2021,
        "Proceedings of the 30th ACM International Conference on Information and Knowledge Management",
        "10.1145/3459637.3482416",
    ),
    (
        "Never-ending learning for open-domain question answering over knowledge bases",
        ["Abdalghani Abujabal", "Rishiraj Saha Roy", "Mohamed Yahya"],
        2018,
        "Proceedings of the 2018 World Wide Web Conference",
        "10.1145/3178876.3186004",
    ),
    (
        "An approach for answering complex questions over knowledge graphs with reinforcement learning",
        ["Yuncheng Hua", "Yuan-Fang Li", "Gholamreza Haffari"],
        2020,
        "Knowledge-Based Systems",
        "10.1016/j.knosys.2020.106274",
    ),
    (
        "Conversational question answering over knowledge graphs with transformer and graph attention networks",
        ["Endri Kacupaj", "Joan Plepi", "Kuldeep Singh"],
        2021,
        "Proceedings of the 16th Conference of the European Chapter of the ACL",
        "10.18653/v1/2021.eacl-main.72",
    ),
    (
        "Evaluating question answering systems over linked data",
        ["Andreas Both", "Dennis Diefenbach", "Kuldeep Singh"],
        2016,
        "Semantic Web Challenges",
        None,
    ),
]


def ask_item(title, authors, year, journal, doi, idx):
    return {
        "id": f"ask-{idx}",
        "title": title,
        "authors": authors,
        "year": year,
        "journals": [journal] if journal else [],
        "doi": doi,
        "abstract": f"We study {title[0].lower()}{title[1:]}.",
        "citation_count": 40 - idx,
    }


def ask_fixtures():
    query = "knowledge graphs question answering"
    items = [ask_item(*entry, idx=i) for i, entry in enumerate(ASK_ITEMS)]
    for page, chunk in ((0, items[:10]), (1, items[10:])):
        write(
            f"ask_kgqa_p{page}",
            {
                "request": {
                    "method": "GET",
                    "url": "https://api.ask.orkg.org/index/search",
                    "params": {"query": query, "limit": 10, "offset": page * 10},
                },
                "response": {
                    "status": 200,
                    "contentType": "application/json",
                    "bodyJson": {
                        "payload": {"items": chunk, "total_hits": len(items)},
                        "timestamp": "2025-11-14T09:30:11Z",
                    },
                },
            },
        )
    write(
        "ask_empty",
        {
            "request": {
                "method": "GET",
                "url": "https://api.ask.orkg.org/index/search",
                "params": {
                    "query": "hopeless query with no matches",
                    "limit": 10,
                    "offset": 0,
                },
            },
            "response": {
                "status": 200,
                "contentType": "application/json",
                "bodyJson": {"payload": {"items": [], "total_hits": 0}},
            },
        },
    )


S2_FIELDS = "title,abstract,year,venue,externalIds,authors,url"

S2_ITEMS = [
    {
        "paperId": "2582c223e6dbd9636bd1525c2a3a34b10b8d2a15",
        "title": "Translating Embeddings for Modeling Multi-relational Data",
        "abstract": "We consider the problem of embedding entities and relationships of multi-relational data in low-dimensional vector spaces.",
        "year": 2013,
        "venue": "Neural Information Processing Systems",
        "externalIds": {"DBLP": "conf/nips/BordesUGWY13"},
        "url": "https://www.semanticscholar.org/paper/2582c2",
        "authors": [
            {"name": "Antoine Bordes"},
            {"name": "Nicolas Usunier"},
            {"name": "Alberto García-Durán"},
        ],
    },
    {
        "paperId": "6b2f30a9f4bdea0b2be5288cd33a7a9c7700b6ea",
        "title": "Knowledge Graph Embedding: A Survey of Approaches and Applications",
        "abstract": "Knowledge graph embedding aims to embed components of a knowledge graph into continuous vector spaces.",
        "year": 2017,
        "venue": "IEEE Transactions on Knowledge and Data Engineering",
        "externalIds": {"DOI": "10.1109/TKDE.2017.2754499"},
        "url": "https://www.semanticscholar.org/paper/6b2f30",
        "authors": [{"name": "Quan Wang"}, {"name": "Zhendong Mao"}, {"name": "Bin Wang"}],
    },
    {
        "paperId": "a40ba99fe0634bd3c4f4f2bc37ec28b4bafabd8c",
        "title": "Complex Embeddings for Simple Link Prediction",
        "abstract": "In statistical relational learning, the link prediction problem is key to automatically understand the structure of large knowledge bases.",
        "year": 2016,
        "venue": "International Conference on Machine Learning",
        "externalIds": {"DBLP": "conf/icml/TrouillonWRGB16"},
        "url": "https://www.semanticscholar.org/paper/a40ba9",
        "authors": [{"name": "Théo Trouillon"}, {"name": "Johannes Welbl"}],
    },
]


def s2_fixtures():
    write(
        "s2_kge_p0",
        {
            "request": {
                "method": "GET",
                "url": "https://api.semanticscholar.org/graph/v1/paper/search",
                "params": {
                    "query": "knowledge graph embeddings",
                    "limit": 10,
                    "offset": 0,
                    "fields": S2_FIELDS,
                },
            },
            "response": {
                "status": 200,
                "contentType": "application/json",
                "bodyJson": {"total": 3, "offset": 0, "data": S2_ITEMS},
            },
        },
    )
    write(
        "s2_empty",
        {
            "request": {
                "method": "GET",
                "url": "https://api.semanticscholar.org/graph/v1/paper/search",
                "params": {
                    "query": "hopeless query with no matches",
                    "limit": 10,
                    "offset": 0,
                    "fields": S2_FIELDS,
                },
            },
            "response": {
                "status": 200,
                "contentType": "application/json",
                "bodyJson": {"total": 0, "offset": 0, "data": []},
            },
        },
    )


def document_fixtures():
    base = "https://files.example.org"
    write(
        "doc_hello",
        {
            "request": {"method": "GET", "url": f"{base}/hello.txt"},
            "response": {"status": 200, "contentType": "text/plain", "bodyText": "hello"},
        },
    )
    sentence = "Scholarly infrastructure keeps the records of science connected. "
    big = (sentence * (150_000 // len(sentence) + 1))[:150_000]
    assert len(big) == 150_000
    write(
        "doc_big",
        {
            "request": {"method": "GET", "url": f"{base}/big.txt"},
            "response": {"status": 200, "contentType": "text/plain", "bodyText": big},
        },
    )
    write(
        "doc_missing",
        {
            "request": {"method": "GET", "url": f"{base}/missing.txt"},
            "response": {"status": 404, "contentType": "text/plain", "bodyText": "not here"},
        },
    )
    write(
        "doc_page_html",
        {
            "request": {"method": "GET", "url": f"{base}/page.html"},
            "response": {
                "status": 200,
                "contentType": "text/html; charset=utf-8",
                "bodyText": (
                    "<html><head><title>Lab notes</title>"
                    "<style>body { color: red }</style>"
                    "<script>alert('x')</script></head>"
                    "<body><h1>Lab notes</h1><p>Knowledge graphs &amp; LLMs.</p></body></html>"
                ),
            },
        },
    )
    pdf_bytes = make_pdf()
    write(
        "doc_paper_pdf",
        {
            "request": {"method": "GET", "url": f"{base}/paper.pdf"},
            "response": {
                "status": 200,
                "contentType": "application/pdf",
                "bodyBase64": base64.b64encode(pdf_bytes).decode("ascii"),
            },
        },
    )


def make_pdf() -> bytes:
    from reportlab.lib.pagesizes import A4
    from reportlab.pdfgen import canvas

    buffer = io.BytesIO()
    page = canvas.Canvas(buffer, pagesize=A4)
    page.drawString(72, 760, "Connecting scholarly artifacts with provenance metadata")
    page.drawString(72, 740, "enables transparent and reproducible research workflows.")
    page.showPage()
    page.save()
    return buffer.getvalue()


if __name__ == "__main__":
    crossref_fixtures()
    orcid_fixtures()
    unpaywall_fixtures()
    ask_fixtures()
    s2_fixtures()
    document_fixtures()
