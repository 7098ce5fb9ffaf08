from rdmkit import Node, test, NodeConfigurationError

import pytest


def test_creation():
    node = Node("test")
    assert node.name == "test"
    assert node.children == ()
    assert node._type == "node"
    assert repr(node) == "Node(test)"
    assert node.key == "test|node"

    with pytest.raises(AttributeError):
        node.name = "newname"

    with pytest.raises(NodeConfigurationError):
        Node(1)

    with pytest.raises(NodeConfigurationError):
        Node("test|test")

    with pytest.raises(NodeConfigurationError):
        Node("test", ["child"])


def test_topological_ordering():
    node4 = Node("node4")
    node5 = Node("node5")
    node6 = Node("node6")
    node2 = Node("node2", (node4, node5))
    node3 = Node("node3", (node6,))
    node1 = Node("node1", (node2, node3))

    ordering = node1.topological_ordering()
    assert ordering == (node1, node2, node4, node5, node3, node6)

    ordering = node1.topological_ordering(with_type="node")
    assert ordering == (node1, node2, node4, node5, node3, node6)

    ordering = node1.topological_ordering(with_type="leaf")
    assert ordering == ()

    assert node1[0] is node2
    assert node1[1][0] is node6


@pytest.mark.parametrize("top_down", [True, False])
def test_graphviz(top_down):
    root = Node("root", (Node("a"), Node("b", (Node("c"),))))
    graph = root.graphviz(top_down)
    assert graph is not None, "should return a graphviz object"


def test_graph_dict():
    root = Node("root", (Node("a"), Node("a"), Node("b", (Node("c"),))))
    assert root.graph_dict() == {
        "root|node": {"a|node": {}, "a|node#1": {}, "b|node": {"c|node": {}}}
    }
    text = str(root)
    assert text.startswith("root|node")
    assert "a|node#1" in text
    assert "        c|node" in text


def test_test():
    test()
