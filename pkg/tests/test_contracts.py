import json

import pytest

from btsynth.contracts import (
    BuildReport,
    ConditionEntry,
    Contract,
    ContractStore,
    SchemaError,
    build_dataset,
    dumps,
    load,
    loads,
    lookup,
    parse_relation,
    save,
    scan_corpus,
)
from btsynth.lang import ProbeSpec
from btsynth.llm import ScriptedBackend

from figures import CONTRACT_JSON


class TestRelationGrammar:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("!=null", ("!=", 0)),
            ("==2", ("==", 2)),
            (">= 0", (">=", 0)),
            ("<=4095", ("<=", 4095)),
            (">-1", (">", -1)),
            ("==0x10", ("==", 16)),
            ("< 65536", ("<", 65536)),
        ],
    )
    def test_checkable(self, text, expected):
        assert parse_relation(text) == expected

    @pytest.mark.parametrize(
        "text",
        ["is a socket", "!= sk->port", "== ", "=5", "nonzero", ""],
    )
    def test_uncheckable(self, text):
        assert parse_relation(text) is None
        assert not ConditionEntry("x", text).checkable


class TestSchema:
    def test_figure_contract_loads(self):
        store = loads(CONTRACT_JSON)
        assert len(store) == 1
        c = store.entries["kretprobe:tcp_connect_init"]
        assert c.pre == (ConditionEntry("sk", "!=null"),)
        assert c.post == ()

    def test_full_entry(self):
        store = loads(
            json.dumps(
                {
                    "kretprobe:vfs_read": {
                        "pre": {"file": "!=null"},
                        "post": {"retval": ">=-4095"},
                        "semantics": "reads bytes",
                        "prototype": "ssize_t vfs_read(...)",
                    }
                }
            )
        )
        c = store.entries["kretprobe:vfs_read"]
        assert c.post[0].relation == ">=-4095"
        assert c.semantics == "reads bytes"
        assert c.target == "vfs_read"

    @pytest.mark.parametrize(
        "doc,fragment",
        [
            ("[]", "top level"),
            ("{bad json", "invalid JSON"),
            ('{"uprobe:f": {}}', "probe key"),
            ('{"kprobe:f": 5}', "must be an object"),
            ('{"kprobe:f": {"pref": {}}}', "unknown field"),
            ('{"kprobe:f": {"pre": []}}', "pre must be an object"),
            ('{"kprobe:f": {"pre": {"": "!=null"}}}', "empty subject"),
            ('{"kprobe:f": {"pre": {"x": 1}}}', "must be a string"),
            ('{"kprobe:f": {"semantics": 1}}', "semantics"),
        ],
    )
    def test_rejections(self, doc, fragment):
        with pytest.raises(SchemaError) as err:
            loads(doc)
        assert fragment in str(err.value)


class TestCanonicalForm:
    def test_dumps_sorted_single_line(self):
        store = loads('{"kprobe:b": {"pre": {"x": ">0"}}, "kprobe:a": {}}')
        text = dumps(store)
        assert "\n" not in text
        assert text.index('"kprobe:a"') < text.index('"kprobe:b"')

    def test_empty_sections_omitted(self):
        store = loads('{"kprobe:a": {"pre": {}, "post": {}, "semantics": ""}}')
        assert dumps(store) == '{"kprobe:a": {}}'

    def test_round_trip_stable(self, tmp_path):
        store = loads(CONTRACT_JSON)
        p = tmp_path / "c.json"
        save(store, p)
        again = load(p)
        assert dumps(again) == dumps(store)
        save(again, p)
        assert p.read_text(encoding="utf-8") == dumps(store)

    def test_figure_text_is_already_canonical(self):
        assert dumps(loads(CONTRACT_JSON)) == CONTRACT_JSON


class TestLookup:
    def make_store(self):
        return loads(
            json.dumps(
                {
                    "kretprobe:tcp_connect_init": {"pre": {"sk": "!=null"}},
                    "kprobe:tcp_connect": {"pre": {"sk": "!=null"}},
                    "kprobe:tcp_conn_request": {},
                    "kprobe:vfs_read": {},
                }
            )
        )

    def test_exact_match_wins_alone(self):
        hits = lookup(self.make_store(), ProbeSpec("kprobe", "tcp_connect"))
        assert [c.probe_key for c in hits] == ["kprobe:tcp_connect"]

    def test_prefix_match_both_directions(self):
        store = loads(CONTRACT_JSON)
        hits = lookup(store, ProbeSpec("kprobe", "tcp_connect"))
        assert [c.probe_key for c in hits] == ["kretprobe:tcp_connect_init"]
        hits = lookup(store, ProbeSpec("kprobe", "tcp_connect_init_v2"))
        assert [c.probe_key for c in hits] == ["kretprobe:tcp_connect_init"]

    def test_ranking_by_overlap(self):
        store = self.make_store()
        hits = lookup(store, ProbeSpec("kretprobe", "tcp_connect_v6"))
        keys = [c.probe_key for c in hits]
        assert keys[0] == "kprobe:tcp_connect"
        assert "kprobe:vfs_read" not in keys

    def test_no_match(self):
        assert lookup(self.make_store(), ProbeSpec("kprobe", "ext4_sync")) == []


CORPUS_FILE = """\
/* Initiate a connection on a socket.
 * Returns 0 on success.
 */
int tcp_connect_init(struct sock *sk)
{
    return 0;
}

// frees a previously allocated buffer
// never returns an error
void buf_free(struct buf *b)
{
}

static int helper(void) { return 1; }
"""


class TestCorpusMining:
    def test_scan_finds_functions_and_comments(self, tmp_path):
        (tmp_path / "net").mkdir()
        (tmp_path / "net" / "tcp.c").write_text(CORPUS_FILE, encoding="utf-8")
        (tmp_path / "README").write_text("not C", encoding="utf-8")
        found = scan_corpus(tmp_path)
        names = [f["name"] for f in found]
        assert names == ["tcp_connect_init", "buf_free", "helper"]
        assert "Initiate a connection" in found[0]["semantics"]
        assert "never returns an error" in found[1]["semantics"]
        assert found[2]["semantics"] == ""
        assert found[0]["prototype"].startswith("int tcp_connect_init")

    def test_build_dataset(self, tmp_path):
        (tmp_path / "tcp.c").write_text(CORPUS_FILE, encoding="utf-8")
        out = tmp_path / "contracts.json"
        llm = ScriptedBackend(
            [
                '{"pre": {"sk": "!=null"}, "post": {"retval": "==0"}}',
                "not json at all {",
                '{"post": {"retval": "==1"}}',
            ]
        )
        store, report = build_dataset(tmp_path, llm, out)
        assert isinstance(report, BuildReport)
        assert report.functions_found == 3
        assert report.contracts_built == 2
        assert len(report.malformed) == 1
        assert report.malformed[0]["function"] == "buf_free"
        c = store.entries["kprobe:tcp_connect_init"]
        assert c.pre == (ConditionEntry("sk", "!=null"),)
        assert "Initiate a connection" in c.semantics
        reloaded = load(out)
        assert dumps(reloaded) == dumps(store)


class TestPackagedData:
    def test_shipped_contracts_parse(self, data_dir):
        store = load(data_dir / "contracts.json")
        assert len(store) >= 5
        hits = lookup(store, ProbeSpec("kprobe", "tcp_connect"))
        assert hits and hits[0].probe_key == "kretprobe:tcp_connect_init"
        text = (data_dir / "contracts.json").read_text(encoding="utf-8")
        assert dumps(store) == text
