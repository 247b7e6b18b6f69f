import os

import pytest

import mailclass

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def test_parse_eml_and_text():
    email = mailclass.parse_eml(b"Subject: Hi\n\nthere")
    assert [(h.name, h.value) for h in email.headers] == [("Subject", "Hi")]
    assert len(email.body_parts) == 1
    assert email.body_parts[0].raw_bytes == b"there"
    assert email.text() == "Hi there"
    assert email.header("subject") == "Hi"


def test_mbox_round_trip():
    with open(os.path.join(FIXTURES, "gmail.mbox"), "rb") as f:
        emails = mailclass.parse_mbox(f.read())
    assert len(emails) == 8
    again = mailclass.parse_mbox(mailclass.serialize_mbox(emails))
    assert [e.text() for e in again] == [e.text() for e in emails]


def test_load_fixture_directory():
    corpus = mailclass.load_corpus(os.path.join(FIXTURES, "labeled"))
    assert len(corpus) == 4
    assert corpus.labels == ["Billing", "Support"]
    stats = mailclass.corpus_stats(corpus)
    assert stats["total_words"] == 17
    assert stats["emails"] == {"Billing": 2, "Support": 2}


def test_text_helpers():
    assert mailclass.tokenize("What of the refund") == ["refund"]
    assert mailclass.tokenize("don't go", stop_words=[]) == ["don't", "go"]
    assert "and" in mailclass.english_stop_words()
    assert mailclass.build_vocabulary([["refund", "refund", "late"], ["refund"]]) == [("refund", 3), ("late", 1)]


def test_chi2_split_and_confusion():
    scores = mailclass.chi2_scores([[1, 0], [1, 0], [0, 1], [0, 1]], [0, 0, 1, 1], 2)
    assert scores == pytest.approx([2.0, 2.0])
    train, test = mailclass.train_test_split([0] * 608, 0.9, 42, False)
    assert (len(train), len(test)) == (548, 60)
    counts, accuracy = mailclass.confusion_matrix([0, 0, 1], [0, 1, 1], 2)
    assert counts == [[1, 1], [0, 1]]
    assert accuracy == pytest.approx(2 / 3)


def test_errors_carry_codes():
    with pytest.raises(mailclass.MailclassError) as info:
        mailclass.train_test_split([0, 0, 0, 1], 0.5, 1, True)
    assert info.value.code == "StratifyError"
    assert info.value.exit_status == 2
    with pytest.raises(mailclass.MailclassError):
        mailclass.train(no_such_key=1)


def test_train_predict_sweep(tmp_path):
    corpus = mailclass.synthetic_corpus()
    assert len(corpus) == 589
    out = tmp_path / "model"
    summary = mailclass.train(out_dir=str(out), hidden_units=16)
    assert summary["accuracy"] >= 0.9
    assert summary["output"].startswith("Test accuracy: ")
    assert len(summary["files"]) == 5
    doc = next(d for d in corpus.documents if d.label == "Imagic")
    label, probabilities = mailclass.predict(str(out / "model.json"), doc.text)
    assert label == "Imagic"
    assert sum(probabilities.values()) == pytest.approx(1.0)

    result = mailclass.sweep("hidden", [1, 16], out_dir=str(tmp_path / "sweep"), num_words=500)
    assert [p["value"] for p in result["points"]] == [1.0, 16.0]
    assert result["csv"].splitlines()[0] == "param,accuracy,train_seconds,epochs_run"
    assert "hidden_units" in mailclass.config_keys()
