from typing import Optional, Sequence

from .errors import NodeConfigurationError


class Node(object):
    """
    Base tree node class for ``rdmkit`` objects.

    The ``Node`` object is the base class for the tree shaped values of
    ``rdmkit``: factorized provenance expressions (``FactorExpr``) and the
    variable forests of query plans (``PlanNode``). A ``Node`` is immutable,
    its children are fixed at construction, so trees can be shared freely
    between threads and cached. The base class implements traversal, a
    nested text dump and a ``graphviz`` rendering; subclasses decide what a
    node means.

    Examples
    --------

    Example making a small tree and printing it::

       leaf1 = Node("a")
       leaf2 = Node("b")
       root = Node("root", (leaf1, leaf2))
       print(root)
       # root|node
       #     a|node
       #     b|node
    """

    graphviz_types = {"node": {"style": "solid", "color": "black", "shape": "circle"}}

    def __init__(self, name: str, children: Sequence["Node"] = ()):
        kind = type(self).__name__
        if not isinstance(name, str):
            raise NodeConfigurationError(f"{kind} names are strings, got {name!r}")
        if "|" in name:
            raise NodeConfigurationError(f"{kind} name {name!r} uses the reserved '|' separator")
        children = tuple(children)
        for child in children:
            if not isinstance(child, Node):
                raise NodeConfigurationError(
                    f"Children of {self.__class__.__name__} must be Node objects, got {type(child)}"
                )
        self._name = name
        self._children = children
        self._type = "node"

    @property
    def name(self) -> str:
        return self._name

    @property
    def children(self) -> tuple["Node", ...]:
        return self._children

    @property
    def key(self) -> str:
        """``name|type`` label used by the text dump."""
        return f"{self.name}|{self._type}"

    def topological_ordering(self, with_type: Optional[str] = None) -> tuple["Node", ...]:
        """Return the nodes of the tree below (and including) the current node
        in pre-order, optionally filtered by node type."""
        ordering = []
        stack = [self]
        while stack:
            node = stack.pop()
            if with_type is None or node._type == with_type:
                ordering.append(node)
            stack.extend(reversed(node.children))
        return tuple(ordering)

    def label(self) -> str:
        """Text shown for the node in ``graphviz`` renderings."""
        return repr(self)

    def graphviz(self, top_down=True) -> "graphviz.Digraph":
        """Return a graphviz object representing the tree below the current
        node.

        Parameters
        ----------
        top_down: (bool, optional)
            Draw the root at the top with edges pointing to the children
            (True), or at the bottom with edges pointing to the parent
            (False). Defaults to True.
        """
        import graphviz

        nodes = self.topological_ordering()
        ids = {id(node): str(i) for i, node in enumerate(nodes)}
        dot = graphviz.Digraph(strict=True)
        for node in nodes:
            dot.node(ids[id(node)], node.label(), **node.graphviz_types[node._type])
            for child in node.children:
                edge = (ids[id(node)], ids[id(child)])
                dot.edge(*(edge if top_down else edge[::-1]))
        return dot

    def graph_dict(self) -> dict[str, dict]:
        """Nested ``{name|type: {...}}`` view of the tree below the current
        node. Repeated sibling keys get a ``#n`` suffix."""
        subtree = {}
        for child in self.children:
            base = key = child.key
            count = 0
            while key in subtree:
                count += 1
                key = f"{base}#{count}"
            subtree[key] = child.graph_dict()[child.key]
        return {self.key: subtree}

    def graph_print(self, dag: dict, depth: int = 0, indent: int = 4) -> str:
        """Render a ``graph_dict`` one key per line, children indented below
        their parent."""
        lines = []
        for key, subtree in dag.items():
            lines.append(" " * (indent * depth) + key)
            below = self.graph_print(subtree, depth + 1, indent)
            if below:
                lines.append(below)
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.graph_print(self.graph_dict())

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"

    def __getitem__(self, index: int) -> "Node":
        return self.children[index]
