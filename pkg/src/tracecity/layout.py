"""Deterministic ground plan: method plots in class blocks in package districts.

Every method occupies a uniform 1x1 plot. Methods are laid out alphabetically
in a near-square grid per class; classes and sub-packages of one parent are
packed together on shelves, largest method count first, so the biggest child
always sits at its parent's bottom-left corner. Equal registries produce
identical layouts regardless of registration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import MethodDescriptor, MethodId, MethodRegistry


class EmptyRegistry(Exception):
    """A city cannot be built from zero methods."""


@dataclass(frozen=True, slots=True)
class Plot:
    """One method's 1x1 ground cell."""

    method: MethodId
    x: int
    z: int


@dataclass(frozen=True, slots=True)
class Block:
    """A class: its methods' plots in a contiguous rectangle."""

    class_name: str
    package_path: tuple[str, ...]
    origin: tuple[int, int]
    extent: tuple[int, int]
    plots: tuple[Plot, ...]  # alphabetical by method name, row-major


@dataclass(frozen=True, slots=True)
class District:
    """A package or sub-package: a bordered rectangle holding its children."""

    package_path: tuple[str, ...]
    origin: tuple[int, int]
    extent: tuple[int, int]
    depth: int
    method_count: int


@dataclass(frozen=True)
class CityLayout:
    rev: int
    extent: tuple[int, int]
    districts: tuple[District, ...]  # all nesting levels, outermost first
    blocks: tuple[Block, ...]
    index: dict[MethodId, Plot] = field(default_factory=dict)


@dataclass(frozen=True)
class StructureDelta:
    """What changed between two layout revisions, for plots and districts."""

    added_plots: tuple[MethodId, ...]
    removed_plots: tuple[MethodId, ...]
    moved_plots: tuple[MethodId, ...]
    added_districts: tuple[tuple[str, ...], ...]
    removed_districts: tuple[tuple[str, ...], ...]
    moved_districts: tuple[tuple[str, ...], ...]

    @property
    def empty(self) -> bool:
        return not (
            self.added_plots
            or self.removed_plots
            or self.moved_plots
            or self.added_districts
            or self.removed_districts
            or self.moved_districts
        )


class _PackageNode:
    __slots__ = ("path", "classes", "children")

    def __init__(self, path: tuple[str, ...]):
        self.path = path
        self.classes: dict[str, list[MethodDescriptor]] = {}
        self.children: dict[str, _PackageNode] = {}

    def child(self, segment: str) -> "_PackageNode":
        node = self.children.get(segment)
        if node is None:
            node = self.children[segment] = _PackageNode(self.path + (segment,))
        return node

    def method_count(self) -> int:
        own = sum(len(methods) for methods in self.classes.values())
        return own + sum(child.method_count() for child in self.children.values())


@dataclass
class _Placed:
    """A laid-out child before translation to absolute coordinates."""

    kind: str  # "block" | "district"
    name: str
    count: int
    extent: tuple[int, int]
    offset: tuple[int, int] = (0, 0)
    # block payload
    class_methods: list[MethodDescriptor] | None = None
    package_path: tuple[str, ...] = ()
    # district payload
    node_children: list["_Placed"] | None = None


def _block_extent(n: int) -> tuple[int, int]:
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    return cols, rows


def _shelf_pack(children: list[_Placed]) -> tuple[int, int]:
    """Assign relative offsets left-to-right on shelves; returns packed extent.

    Children must already be size-ordered. One empty cell separates neighbors
    and shelves. The shelf width cap keeps the packing near-square while the
    first (largest) child stays at the bottom-left.
    """
    area = sum(placed.extent[0] * placed.extent[1] for placed in children)
    cap = math.ceil(math.sqrt(area)) * 1.2
    x = 0
    shelf_z = 0
    shelf_h = 0
    width = 0
    for placed in children:
        w, h = placed.extent
        if x > 0 and x + w > cap:
            shelf_z += shelf_h + 1
            x = 0
            shelf_h = 0
        placed.offset = (x, shelf_z)
        x += w + 1
        width = max(width, x - 1)
        shelf_h = max(shelf_h, h)
    return width, shelf_z + shelf_h


def _layout_children(node: _PackageNode) -> list[_Placed]:
    children: list[_Placed] = []
    for class_name, methods in node.classes.items():
        children.append(
            _Placed(
                kind="block",
                name=class_name,
                count=len(methods),
                extent=_block_extent(len(methods)),
                class_methods=sorted(methods, key=lambda d: d.method_name),
                package_path=node.path,
            )
        )
    for segment, sub in node.children.items():
        sub_children = _layout_children(sub)
        inner_w, inner_h = _shelf_pack(sub_children)
        children.append(
            _Placed(
                kind="district",
                name=segment,
                count=sub.method_count(),
                extent=(inner_w + 2, inner_h + 2),  # 1-cell border all around
                node_children=sub_children,
                package_path=sub.path,
            )
        )
    children.sort(key=lambda placed: (-placed.count, placed.name, placed.kind))
    return children


def build_layout(registry: MethodRegistry, rev: int = 0) -> CityLayout:
    """Compute the full ground plan for the current registry.

    Pure function of the registry's descriptor set; raises EmptyRegistry when
    there is nothing to place. The largest top-level child lands at (0, 0).
    """
    descriptors = registry.descriptors()
    if not descriptors:
        raise EmptyRegistry("no methods registered")

    root = _PackageNode(())
    for desc in descriptors:
        node = root
        for segment in desc.package_path:
            node = node.child(segment)
        node.classes.setdefault(desc.class_name, []).append(desc)

    top = _layout_children(root)
    width, height = _shelf_pack(top)

    districts: list[District] = []
    blocks: list[Block] = []
    index: dict[MethodId, Plot] = {}

    def place(placed: _Placed, base_x: int, base_z: int, depth: int) -> None:
        x = base_x + placed.offset[0]
        z = base_z + placed.offset[1]
        if placed.kind == "block":
            cols, _rows = placed.extent
            plots = []
            for i, desc in enumerate(placed.class_methods or []):
                plot = Plot(method=desc.id, x=x + i % cols, z=z + i // cols)
                plots.append(plot)
                index[desc.id] = plot
            blocks.append(
                Block(
                    class_name=placed.name,
                    package_path=placed.package_path,
                    origin=(x, z),
                    extent=placed.extent,
                    plots=tuple(plots),
                )
            )
        else:
            districts.append(
                District(
                    package_path=placed.package_path,
                    origin=(x, z),
                    extent=placed.extent,
                    depth=depth,
                    method_count=placed.count,
                )
            )
            for child in placed.node_children or []:
                place(child, x + 1, z + 1, depth + 1)  # inside the border

    for placed in top:
        place(placed, 0, 0, 0)

    return CityLayout(
        rev=rev,
        extent=(width, height),
        districts=tuple(districts),
        blocks=tuple(blocks),
        index=index,
    )


def diff_layout(old: CityLayout, new: CityLayout) -> StructureDelta:
    """Plot- and district-level changes between two revisions."""
    old_plots, new_plots = old.index, new.index
    added_plots = tuple(sorted(set(new_plots) - set(old_plots)))
    removed_plots = tuple(sorted(set(old_plots) - set(new_plots)))
    moved_plots = tuple(
        sorted(
            mid
            for mid in set(old_plots) & set(new_plots)
            if (old_plots[mid].x, old_plots[mid].z) != (new_plots[mid].x, new_plots[mid].z)
        )
    )
    old_d = {d.package_path: d for d in old.districts}
    new_d = {d.package_path: d for d in new.districts}
    added_districts = tuple(sorted(set(new_d) - set(old_d)))
    removed_districts = tuple(sorted(set(old_d) - set(new_d)))
    moved_districts = tuple(
        sorted(
            path
            for path in set(old_d) & set(new_d)
            if (old_d[path].origin, old_d[path].extent)
            != (new_d[path].origin, new_d[path].extent)
        )
    )
    return StructureDelta(
        added_plots=added_plots,
        removed_plots=removed_plots,
        moved_plots=moved_plots,
        added_districts=added_districts,
        removed_districts=removed_districts,
        moved_districts=moved_districts,
    )
