import io

import numpy as np
import pytest

from projsdp.errors import ParseError, UnsupportedFeature
from projsdp.fileio import (
    instance_from_dict,
    instance_to_dict,
    load_instance,
    load_matrix_pair,
    parse_sdpa,
    save_instance,
    save_matrix_pair,
    write_sdpa,
)
from projsdp.instances import GenParams, generate_instance
from projsdp.model import SdpInstance

MINIMAL = """\
1
1
1
1.0
0 1 1 1 5.0
1 1 1 1 1.0
"""

WITH_LP_BLOCK = """\
2
2
2 -2
1.0 0.5
0 1 1 1 4.0
0 1 2 2 4.0
0 2 1 1 3.0
0 2 2 2 7.0
1 1 1 2 1.0
1 2 1 1 1.0
2 2 2 2 -1.0
"""


def instances_equal(a, b):
    if a.n != b.n or a.k != b.k:
        return False
    if not np.array_equal(a.b, b.b) or not np.array_equal(a.C, b.C):
        return False
    if any(not np.array_equal(x, y) for x, y in zip(a.A, b.A)):
        return False
    if len(a.linear_constraints) != len(b.linear_constraints):
        return False
    for (av, ac), (bv, bc) in zip(a.linear_constraints, b.linear_constraints):
        if not np.array_equal(av, bv) or ac != bc:
            return False
    return True


class TestParse:
    def test_minimal_file(self):
        inst = parse_sdpa(MINIMAL)
        assert inst.k == 1 and inst.n == 1
        np.testing.assert_array_equal(inst.C, [[5.0]])
        np.testing.assert_array_equal(inst.A[0], [[1.0]])
        np.testing.assert_array_equal(inst.b, [1.0])

    def test_lp_block_maps_to_linear_rows(self):
        inst = parse_sdpa(WITH_LP_BLOCK)
        assert inst.n == 2 and inst.k == 2
        assert len(inst.linear_constraints) == 2
        a0, c0 = inst.linear_constraints[0]
        np.testing.assert_array_equal(a0, [1.0, 0.0])
        assert c0 == 3.0
        a1, c1 = inst.linear_constraints[1]
        np.testing.assert_array_equal(a1, [0.0, -1.0])
        assert c1 == 7.0
        # off-diagonal mirrored into both triangles
        assert inst.A[0][0, 1] == inst.A[0][1, 0] == 1.0

    def test_comments_and_braces_tolerated(self):
        text = '* a comment\n"another\n1\n1\n{1}\n1.0\n0 1 1 1 5.0\n1 1 1 1 1.0\n'
        inst = parse_sdpa(text)
        assert inst.C[0, 0] == 5.0

    def test_stream_input(self):
        inst = parse_sdpa(io.StringIO(MINIMAL))
        assert inst.n == 1

    def test_malformed_entry_names_line(self):
        bad = MINIMAL.replace("0 1 1 1 5.0", "0 1 7 1 5.0")
        with pytest.raises(ParseError) as err:
            parse_sdpa(bad)
        assert err.value.line == 5

    def test_bad_token_count(self):
        bad = MINIMAL.replace("0 1 1 1 5.0", "0 1 1 5.0")
        with pytest.raises(ParseError):
            parse_sdpa(bad)

    def test_two_sdp_blocks_unsupported(self):
        text = "1\n2\n2 2\n1.0\n0 1 1 1 5.0\n"
        with pytest.raises(UnsupportedFeature):
            parse_sdpa(text)

    def test_off_diagonal_in_lp_block(self):
        bad = WITH_LP_BLOCK + "2 2 1 2 1.0\n"
        with pytest.raises(ParseError):
            parse_sdpa(bad)

    def test_truncated_header(self):
        with pytest.raises(ParseError):
            parse_sdpa("1\n1\n")


class TestRoundTrip:
    def test_write_then_parse_identity(self):
        inst = parse_sdpa(WITH_LP_BLOCK)
        text = write_sdpa(inst)
        again = parse_sdpa(text)
        assert instances_equal(inst, again)

    def test_seeded_instances_entry_exact(self):
        for seed in range(20):
            inst = generate_instance(GenParams(n=6, k=3, seed=seed))
            again = parse_sdpa(write_sdpa(inst))
            assert instances_equal(inst, again)

    def test_write_deterministic(self):
        inst = generate_instance(GenParams(n=5, k=2, seed=1))
        assert write_sdpa(inst) == write_sdpa(inst)

    def test_native_round_trip(self):
        inst = generate_instance(GenParams(n=5, k=2, seed=3, nonneg_y=True))
        again = instance_from_dict(instance_to_dict(inst))
        assert instances_equal(inst, again)

    def test_file_round_trip(self, tmp_path):
        inst = generate_instance(GenParams(n=4, k=2, seed=9))
        sdpa_path = tmp_path / "inst.dat-s"
        save_instance(inst, str(sdpa_path))
        assert instances_equal(inst, load_instance(str(sdpa_path)))
        json_path = tmp_path / "inst.json"
        save_instance(inst, str(json_path))
        assert instances_equal(inst, load_instance(str(json_path)))

    def test_matrix_pair_round_trip(self, tmp_path):
        X = np.diag([1.0, 0.0])
        D = np.array([[0.0, 1.0], [1.0, 0.0]])
        path = tmp_path / "pair.json"
        save_matrix_pair(X, D, str(path))
        X2, D2 = load_matrix_pair(str(path))
        assert np.array_equal(X, X2) and np.array_equal(D, D2)
