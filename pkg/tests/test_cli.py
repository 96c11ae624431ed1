from __future__ import annotations

import json

import pytest

from glanoir.bibstore import BibStore
from glanoir.cli import main
from glanoir.mockoai import MockOaiServer


class TestIngest:
    def test_prints_report(self, fixtures_dir, capsys):
        code = main(["ingest", str(fixtures_dir / "dblp3.xml")])
        assert code == 0
        assert capsys.readouterr().out.splitlines()[0] == "ok=3 skipped=0"

    def test_skip_reasons_listed(self, fixtures_dir, capsys):
        code = main(["ingest", str(fixtures_dir / "dblp_skip.xml")])
        assert code == 0
        out = capsys.readouterr().out
        assert "ok=2 skipped=1" in out
        assert "skipped[missing_title]=1" in out

    def test_snapshot_written_and_updated(self, fixtures_dir, tmp_path, capsys):
        snapshot = tmp_path / "corpus.glnr"
        assert main(["ingest", str(fixtures_dir / "dblp3.xml"), "--snapshot", str(snapshot)]) == 0
        assert snapshot.exists()
        # second ingest updates the same snapshot rather than starting over
        assert main(["ingest", str(fixtures_dir / "dblp_skip.xml"), "--snapshot", str(snapshot)]) == 0
        store = BibStore.load(snapshot)
        assert len(store) == 5

    def test_missing_file_fails_with_diagnostic(self, capsys):
        code = main(["ingest", "/no/such/file.xml"])
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")


class TestQuery:
    def test_matches_then_titles(self, fixtures_dir, tmp_path, capsys):
        snapshot = tmp_path / "corpus.glnr"
        main(["ingest", str(fixtures_dir / "dblp3.xml"), "--snapshot", str(snapshot)])
        capsys.readouterr()
        code = main([
            "query", "information retrieval", "--lang", "en",
            "--taxonomy", str(fixtures_dir / "ccs_fragment.graphml"),
            "--snapshot", str(snapshot),
        ])
        assert code == 0
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert lines[0].startswith("1. H.3.3 Information Search and Retrieval")
        assert "-- records --" in out
        assert "Graph Structures for Information Retrieval" in out

    def test_uses_bundled_taxonomy_by_default(self, capsys):
        code = main(["query", "digital libraries", "--lang", "en"])
        assert code == 0
        assert "H.3.7" in capsys.readouterr().out


class TestExport:
    def test_unknown_record_exits_nonzero(self, capsys):
        code = main(["export", "k1", "--format", "ris"])
        assert code == 1
        assert "unknown record: k1" in capsys.readouterr().err

    def test_bibtex_to_stdout(self, fixtures_dir, tmp_path, capsys):
        snapshot = tmp_path / "corpus.glnr"
        main(["ingest", str(fixtures_dir / "dblp3.xml"), "--snapshot", str(snapshot)])
        capsys.readouterr()
        code = main(["export", "journals/cacm/Knuth74", "--format", "bibtex",
                     "--snapshot", str(snapshot)])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("@article{journals/cacm/Knuth74,")
        assert out.endswith("}\n")


class TestHarvest:
    def test_merge_into_snapshot_deduplicates(self, fixtures_dir, tmp_path, capsys):
        fixture = json.loads((fixtures_dir / "oai_5records.json").read_text("utf-8"))
        snapshot = tmp_path / "harvest.glnr"
        with MockOaiServer(fixture) as server:
            for _ in range(2):
                code = main([
                    "harvest", server.base_url,
                    "--snapshot", str(snapshot),
                    "--delay", "0.01",
                ])
                assert code == 0
        out = capsys.readouterr().out
        assert "harvested=4 merged=4 skipped=0" in out
        store = BibStore.load(snapshot)
        assert len(store) == 4
        assert store.get_record("oai:oai:mock:1").title == "Information Retrieval on the Web"

    def test_keyword_filter(self, fixtures_dir, tmp_path, capsys):
        fixture = json.loads((fixtures_dir / "oai_5records.json").read_text("utf-8"))
        snapshot = tmp_path / "harvest.glnr"
        with MockOaiServer(fixture) as server:
            code = main([
                "harvest", server.base_url,
                "--keywords", "retrieval",
                "--snapshot", str(snapshot),
                "--delay", "0.01",
            ])
        assert code == 0
        assert "harvested=2 merged=2" in capsys.readouterr().out
        assert len(BibStore.load(snapshot)) == 2

    def test_unreachable_endpoint_fails(self, capsys):
        import socket

        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        code = main(["harvest", f"http://127.0.0.1:{port}/oai", "--delay", "0.01",
                     "--retries", "1"])
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")


class TestServe:
    def test_bad_config_exits_nonzero(self, tmp_path, capsys):
        config = tmp_path / "bad.conf"
        config.write_text("snapshot_path = /no/such/snapshot\n", encoding="utf-8")
        code = main(["serve", "--config", str(config)])
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")
