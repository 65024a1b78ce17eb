from hypothesis import strategies as st

from nearperfect import TerminalMatrix


@st.composite
def matrices(draw, max_d=8, max_n=10, min_n=1, distinct=False):
    d = draw(st.integers(1, max_d))
    elems = st.integers(0, (1 << d) - 1)
    if distinct:
        rows = draw(st.lists(elems, min_size=min(min_n, 1 << d), max_size=min(max_n, 1 << d), unique=True))
    else:
        rows = draw(st.lists(elems, min_size=min_n, max_size=max_n))
    return TerminalMatrix(tuple(rows), tuple(f"t{k}" for k in range(len(rows))), d)
