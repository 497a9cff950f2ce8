from weakhyp.register import register

# A = xi [[0, 1], [t^2, 0]], eigenvalues +-t xi
register(
    id='jt_example',
    filename='jt_example.json',
    description='weakly hyperbolic 2x2 system with a single double point at t = 0'
)

register(
    id='strict_const',
    filename='strict_const.json',
    description='strictly hyperbolic constant system diag(xi, 2 xi)'
)

# char poly (tau - t xi)^2
register(
    id='double_root',
    filename='double_root.json',
    description='double characteristic root for all t, Delta vanishes identically'
)
