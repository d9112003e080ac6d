"""The three-point path where the kernel split bound is attained.

Prints the constants of the source, the map and the target, the kernel split
constant, and one explicit split of the kernel generator.
"""

from coarsealg.filtered import insular_constant, split_constant
from coarsealg.morphism import control_report, kernel, split_kernel_element
from coarsealg.scenario import path3_kernel


def main():
    sc = path3_kernel()
    phi, sp = sc.maps["phi"], sc.space
    delta = split_constant(phi.source).value
    rep = control_report(phi)
    d = insular_constant(phi.target).value
    K = kernel(phi)
    print(f"space {sc.space_expr}, ring {sc.ring}")
    print(f"source split delta = {delta}, bicontrol b = {rep.bicontrol.value}, target insular d = {d}")
    print(f"bound delta + 2b + d = {delta + 2 * rep.bicontrol.value + d}")
    print(f"kernel rank {K.rank}, kernel split constant {K.constant('split').value}")
    z = K.basis[0]
    res = split_kernel_element(phi, z, sp.mask([0]), sp.mask([2]))
    show = lambda v: "(" + ", ".join(str(x) for x in v) + ")"
    print(f"z = {show(z)} splits as z1 = {show(res.z1)} + z2 = {show(res.z2)} at radius {res.radius}")


if __name__ == "__main__":
    main()
