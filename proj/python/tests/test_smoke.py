import os

import pytest

import abestore

SCENARIO_DIR = os.environ.get(
    "ABESTORE_SCENARIO_DIR",
    os.path.join(os.path.dirname(__file__), "..", "..", "scenarios"),
)


@pytest.fixture(params=["mock", "pairing"])
def engine(request):
    return abestore.Engine(request.param)


def test_encrypt_decrypt_round_trip(engine):
    pk, mk = engine.setup(["finance", "audit", "ops"], seed=1)
    key = engine.keygen(pk, mk, ["finance", "audit"], seed=2)
    ct = engine.encrypt(pk, b"quarterly numbers", "finance and audit", seed=3)
    assert engine.decrypt(pk, ct, key) == b"quarterly numbers"

    outsider = engine.keygen(pk, mk, ["ops"], seed=4)
    with pytest.raises(abestore.DecryptError):
        engine.decrypt(pk, ct, outsider)


def test_serialization_survives_round_trip(engine):
    pk, mk = engine.setup(["a", "b"], seed=5)
    key = engine.keygen(pk, mk, ["a"], seed=6)
    ct = engine.encrypt(pk, b"x" * 32, "a", seed=7)

    pk2 = abestore.PublicParams.from_bytes(pk.to_bytes())
    key2 = abestore.PrivateKey.from_bytes(key.to_bytes())
    ct2 = abestore.Ciphertext.from_bytes(ct.to_bytes())
    assert engine.decrypt(pk2, ct2, key2) == b"x" * 32
    assert key2.attributes == [("a", 0)]
    assert ct2.policy == ct.policy


def test_chain_handles_large_payloads(engine):
    pk, mk = engine.setup(["a"], seed=8)
    key = engine.keygen(pk, mk, ["a"], seed=9)
    data = bytes(range(256)) * 700  # several chunks
    ct = engine.encrypt_chain(pk, data, "a", seed=10, chunk_size=4096)
    assert engine.decrypt_chain(pk, ct, key) == data


def test_revocation_rotates_epochs():
    e = abestore.Engine("mock")
    pk, mk = e.setup(["a"], seed=11)
    old = e.keygen(pk, mk, ["a"], seed=12)
    e.reissue_attribute(pk, mk, "a")
    ct = e.encrypt(pk, b"fresh", "a", seed=13)
    with pytest.raises(abestore.DecryptError):
        e.decrypt(pk, ct, old)
    assert e.decrypt(pk, ct, e.keygen(pk, mk, ["a"], seed=14)) == b"fresh"


def test_policy_helpers():
    assert abestore.policy_satisfies(["a", "b"], "a and (b or c)")
    assert not abestore.policy_satisfies(["c"], "a and (b or c)")
    canonical = abestore.policy_canonical("A or B and C")
    assert canonical == abestore.policy_canonical(canonical)
    with pytest.raises(abestore.ProtocolError):
        abestore.policy_canonical("a and")


def test_simnet_protocol_round_trip():
    net = abestore.SimNet(seed=42)
    net.init("mock", x=4, u=2, ttl_max=900, attributes=["finance"])
    net.add_authz("an1", ["finance"])
    net.add_service("sn1")
    net.enroll("alice", ["finance"], ["v1", "v2"])

    assert net.authenticate("alice", "an1", ["finance"], ["v1", "v2"])["ok"]
    data = os.urandom(100_000)
    assert net.put("alice", "sn1", "r1", "finance", data)["ok"]
    got = net.get("alice", "sn1", "r1")
    assert got["ok"] and got["data"] == data
    ranged = net.get("alice", "sn1", "r1", range=(500, 64))
    assert ranged["ok"] and ranged["data"] == data[500:564]

    net.enroll("eve", ["finance"], ["v1", "v2"])
    denied = net.authenticate("eve", "an1", ["finance"], ["v1"])  # below the u=2 floor
    assert not denied["ok"] and denied["code"] == "AuthFailed"


def test_simnet_determinism():
    def digest():
        net = abestore.SimNet(seed=7)
        net.init("mock", attributes=["a"])
        net.add_authz("an", ["a"])
        net.add_service("sn")
        net.enroll("c", ["a"], ["v1", "v2"])
        net.authenticate("c", "an", ["a"], ["v1", "v2"])
        net.put("c", "sn", "r", "a", b"payload" * 100)
        return net.transcript_digest()

    assert digest() == digest()


def test_scenario_runner():
    path = os.path.join(SCENARIO_DIR, "weak-eavesdrop.scn")
    if not os.path.exists(path):
        pytest.skip("scenario corpus not available")
    result = abestore.run_scenario_file(path)
    assert result["log"]
    assert all(not r["occurred"] for r in result["reports"])
