import pytest
from hypothesis import given, strategies as st

from tracecity.model import (
    ConflictingRegistration,
    MethodDescriptor,
    MethodRegistry,
    Window,
    placeholder_descriptor,
)


def desc(mid=7, method="run()", cls="MainSinglePlayerThread", pkg=("main",), **kw):
    return MethodDescriptor(id=mid, method_name=method, class_name=cls, package_path=pkg, **kw)


def test_register_into_empty_registry():
    registry = MethodRegistry()
    registry.register(desc())
    assert len(registry) == 1
    assert registry.lookup(7).method_name == "run()"


def test_register_is_idempotent():
    registry = MethodRegistry()
    registry.register(desc())
    version = registry.version
    registry.register(desc())
    assert len(registry) == 1
    assert registry.version == version


def test_rebinding_id_conflicts():
    registry = MethodRegistry()
    registry.register(desc())
    with pytest.raises(ConflictingRegistration):
        registry.register(desc(method="stop()"))


def test_structural_name_cannot_be_reused_by_other_id():
    registry = MethodRegistry()
    registry.register(desc(mid=1))
    with pytest.raises(ConflictingRegistration):
        registry.register(desc(mid=2))


def test_lookup_missing_returns_none():
    assert MethodRegistry().lookup(99) is None


def test_placeholder_descriptor_shape():
    p = placeholder_descriptor(99)
    assert p.method_name == "method#99"
    assert p.class_name == "?"
    assert p.package_path == ()
    assert p.placeholder


def test_placeholder_upgraded_by_real_registration():
    registry = MethodRegistry()
    registry.register(placeholder_descriptor(7))
    registry.register(desc())
    found = registry.lookup(7)
    assert found.method_name == "run()"
    assert not found.placeholder
    assert len(registry) == 1


def test_empty_method_name_rejected():
    with pytest.raises(ValueError):
        MethodDescriptor(id=1, method_name="", class_name="X")


def test_window_bounds():
    w = Window(length_micros=3_000_000, end_micros=2_000_000)
    assert w.start_micros == 0
    assert Window(length_micros=3_000_000, end_micros=5_000_000).start_micros == 2_000_000
    with pytest.raises(ValueError):
        Window(length_micros=0)


@st.composite
def descriptor_batches(draw):
    n = draw(st.integers(1, 30))
    out = []
    for i in range(n):
        out.append(
            MethodDescriptor(
                id=i,
                method_name=f"m{draw(st.integers(0, 5))}()",
                class_name=f"C{i}",  # unique triple per id
                package_path=tuple(draw(st.lists(st.sampled_from("abc"), max_size=2))),
            )
        )
    return out


@given(descriptor_batches(), st.randoms())
def test_last_accepted_descriptor_wins_and_size_matches(batch, rng):
    registry = MethodRegistry()
    order = list(batch)
    rng.shuffle(order)
    seen = {}
    for d in order:
        registry.register(d)
        seen[d.id] = d
    assert len(registry) == len(seen)
    for mid, d in seen.items():
        assert registry.lookup(mid) == d
