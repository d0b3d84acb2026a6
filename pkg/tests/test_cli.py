import json

from click.testing import CliRunner

from cordchat.cli import main


def invoke(args, corpus_dir=None, env=None):
    runner = CliRunner()
    merged = {"CORDCHAT_CORPUS": str(corpus_dir)} if corpus_dir else {}
    merged.update(env or {})
    return runner.invoke(main, args, env=merged, catch_exceptions=False)


def test_ingest_writes_cache(corpus_dir, tmp_path):
    out = tmp_path / "cache.jsonl"
    result = invoke(["ingest", str(corpus_dir), "--out", str(out)])
    assert result.exit_code == 0
    assert "ingested 3 documents" in result.output
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert [d["doc_id"] for d in lines] == ["pmc001", "pmc002", "pmc003"]


def test_ask_prints_answer_and_scores(corpus_dir):
    result = invoke(
        ["ask", "How does the virus spread?", "--approach", "tfidf"],
        corpus_dir=corpus_dir,
    )
    assert result.exit_code == 0
    assert "+" in result.output or "-" in result.output  # score lines


def test_batch_small_grid(corpus_dir, tmp_path):
    out = tmp_path / "answers.jsonl"
    result = invoke(
        ["batch", "--approaches", "tfidf", "--samples", "1", "--out", str(out)],
        corpus_dir=corpus_dir,
    )
    assert result.exit_code == 0
    assert "12 answers, 0 errors" in result.output
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(lines) == 12
    assert {line["question_id"] for line in lines} == set(range(1, 13))


def test_report_prints_tables_and_flags(tmp_path):
    scorefile = tmp_path / "scores.csv"
    rows = ["question_id,approach,sample,annotator,rating"]
    for qid in (1, 2):
        for approach in ("tfidf", "bert"):
            for sample in (1, 2):
                rows.append(f"{qid},{approach},{sample},A1,{3 + (qid + sample) % 2}")
                rows.append(f"{qid},{approach},{sample},A2,{4 - (qid + sample) % 2}")
    scorefile.write_text("\n".join(rows) + "\n", encoding="utf-8")
    result = invoke(["report", str(scorefile)])
    assert result.exit_code == 0
    assert "Average scores by approach" in result.output
    assert "Average scores by question" in result.output
    assert "Inter-annotator agreement (Pearson):" in result.output
    assert "Published-table inconsistencies detected:" in result.output
    assert "question 8" in result.output
