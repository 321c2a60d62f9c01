import pytest

from sha1sac import sha1_core, vectors


def test_packaged_vectors_all_pass():
    report = vectors.validate()
    assert report.ok
    sources = {r.vector.source for r in report.results}
    assert sources == {"SHA1ShortMsg.rsp", "SHA1LongMsg.rsp", "builtin"}
    # 65 short + 64 long messages in the CAVS 11.0 files, plus 2 builtin
    assert len(report.results) == 131


def test_parse_zero_length_message():
    lines = ["# comment", "[L = 20]", "", "Len = 0", "Msg = 00", "MD = DA39A3EE5E6B4B0D3255BFEF95601890AFD80709"]
    (v,) = vectors.parse_rsp(lines)
    assert v.message == b""
    assert v.digest == "da39a3ee5e6b4b0d3255bfef95601890afd80709"


def test_parse_rejects_bit_oriented():
    with pytest.raises(vectors.VectorFileError):
        list(vectors.parse_rsp(["Len = 3", "Msg = 00", "MD = 00"]))


def test_mutated_round_constant_is_caught(monkeypatch):
    k = list(sha1_core.ROUND_CONSTANTS)
    k[2] ^= 1
    monkeypatch.setattr(sha1_core, "ROUND_CONSTANTS", tuple(k))
    report = vectors.validate()
    assert not report.ok
    assert len(report.failures) == len(report.results)


def test_empty_vector_file_is_a_failure(tmp_path):
    (tmp_path / "SHA1ShortMsg.rsp").write_text("# nothing here\n")
    src = vectors.default_vector_dir() / "SHA1LongMsg.rsp"
    (tmp_path / "SHA1LongMsg.rsp").write_text(src.read_text())
    report = vectors.validate(tmp_path)
    assert not report.failures
    assert report.empty_files == [str(tmp_path / "SHA1ShortMsg.rsp")]
    assert not report.ok


def test_missing_vector_files(tmp_path):
    with pytest.raises(vectors.VectorFileError, match="SHA1ShortMsg.rsp"):
        vectors.validate(tmp_path)
