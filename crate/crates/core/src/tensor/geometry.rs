//! Levi-Civita connection and curvature at a single point.

use crate::dsl::Jet2;
use crate::linalg;
use crate::scalar::Field;

/// Everything the curvature identities need at one point, generic over the
/// scalar so a dual-number evaluation yields one more derivative.
///
/// Index layout (row-major, all `n`-sized axes):
/// `dg[c][a][b] = ∂_c g_ab`, `gamma[a][b][c] = Γ^a_bc`,
/// `dgamma[d][a][b][c] = ∂_d Γ^a_bc`, `riemann[l][m][v][s] = R^l_mvs`.
#[derive(Clone, Debug)]
pub struct Geometry<R> {
    pub n: usize,
    pub g: Vec<R>,
    pub ginv: Vec<R>,
    pub det: R,
    pub dg: Vec<R>,
    pub gamma: Vec<R>,
    pub dgamma: Vec<R>,
    pub riemann: Vec<R>,
    pub ricci: Vec<R>,
}

#[inline]
pub(crate) fn i3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}

#[inline]
pub(crate) fn i4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

impl<R: Field> Geometry<R> {
    /// Builds the geometry from second-order jets of the metric components
    /// (`jets[a*n + b]` holds `g_ab`). `None` when `g` is singular.
    pub fn from_jets(jets: &[Jet2<R>], n: usize) -> Option<Self> {
        let g: Vec<R> = jets.iter().map(|j| j.value).collect();
        let (ginv, det) = linalg::invert(&g, n)?;
        let half = R::from_f64(0.5);
        let mut dg = vec![R::zero(); n * n * n];
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    dg[i3(n, c, a, b)] = jets[a * n + b].d(c);
                }
            }
        }
        let ddg = |c: usize, d: usize, a: usize, b: usize| jets[a * n + b].dd(c, d);

        // Christoffel symbols of the first kind, Γ_{e,bc}.
        let mut first = vec![R::zero(); n * n * n];
        for e in 0..n {
            for b in 0..n {
                for c in 0..n {
                    first[i3(n, e, b, c)] = half * (dg[i3(n, b, c, e)] + dg[i3(n, c, b, e)] - dg[i3(n, e, b, c)]);
                }
            }
        }
        let mut gamma = vec![R::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = R::zero();
                    for e in 0..n {
                        s = s + ginv[a * n + e] * first[i3(n, e, b, c)];
                    }
                    gamma[i3(n, a, b, c)] = s;
                }
            }
        }

        // ∂_d g^{ae} = −g^{ap} ∂_d g_pq g^{qe}
        let mut dginv = vec![R::zero(); n * n * n];
        for d in 0..n {
            let slice: Vec<R> = (0..n * n).map(|k| dg[d * n * n + k]).collect();
            let t = linalg::matmul(&linalg::matmul(&ginv, &slice, n), &ginv, n);
            for k in 0..n * n {
                dginv[d * n * n + k] = -t[k];
            }
        }
        let mut dgamma = vec![R::zero(); n * n * n * n];
        for d in 0..n {
            // ∂_d Γ_{e,bc}
            let mut dfirst = vec![R::zero(); n * n * n];
            for e in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        dfirst[i3(n, e, b, c)] = half * (ddg(d, b, c, e) + ddg(d, c, b, e) - ddg(d, e, b, c));
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut s = R::zero();
                        for e in 0..n {
                            s = s
                                + dginv[i3(n, d, a, e)] * first[i3(n, e, b, c)]
                                + ginv[a * n + e] * dfirst[i3(n, e, b, c)];
                        }
                        dgamma[i4(n, d, a, b, c)] = s;
                    }
                }
            }
        }

        let mut riemann = vec![R::zero(); n * n * n * n];
        for l in 0..n {
            for m in 0..n {
                for v in 0..n {
                    for s in 0..n {
                        let mut r = dgamma[i4(n, v, l, m, s)] - dgamma[i4(n, s, l, m, v)];
                        for a in 0..n {
                            r = r + gamma[i3(n, l, a, v)] * gamma[i3(n, a, m, s)]
                                - gamma[i3(n, l, a, s)] * gamma[i3(n, a, m, v)];
                        }
                        riemann[i4(n, l, m, v, s)] = r;
                    }
                }
            }
        }
        let mut ricci = vec![R::zero(); n * n];
        for m in 0..n {
            for s in 0..n {
                let mut r = R::zero();
                for v in 0..n {
                    r = r + riemann[i4(n, v, m, v, s)];
                }
                ricci[m * n + s] = r;
            }
        }
        Some(Self { n, g, ginv, det, dg, gamma, dgamma, riemann, ricci })
    }

    pub fn scalar_curvature(&self) -> R {
        let mut s = R::zero();
        for k in 0..self.n * self.n {
            s = s + self.ginv[k] * self.ricci[k];
        }
        s
    }

    pub fn gamma(&self, a: usize, b: usize, c: usize) -> R {
        self.gamma[i3(self.n, a, b, c)]
    }

    pub fn riemann(&self, l: usize, m: usize, v: usize, s: usize) -> R {
        self.riemann[i4(self.n, l, m, v, s)]
    }
}

impl Geometry<f64> {
    /// `max |Γ^a_bc − Γ^a_cb|`.
    pub fn torsion_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    worst = worst.max((self.gamma(a, b, c) - self.gamma(a, c, b)).abs());
                }
            }
        }
        worst
    }

    /// `‖∇g‖` relative to `1 + ‖∂g‖`.
    pub fn metricity_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for m in 0..n {
                for v in 0..n {
                    let mut r = self.dg[i3(n, a, m, v)];
                    for p in 0..n {
                        r -= self.gamma(p, a, m) * self.g[p * n + v] + self.gamma(p, a, v) * self.g[m * n + p];
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
        worst / (1.0 + linalg::norm(&self.dg))
    }

    /// `∇_a(√|g| g^{mv})` for weight-one densities, relative to
    /// `√|g|·(1 + ‖∂g‖)`.
    pub fn density_metricity_residual(&self) -> f64 {
        let n = self.n;
        let root = self.det.abs().sqrt();
        let trace: Vec<f64> = (0..n).map(|a| (0..n).map(|r| self.gamma(r, r, a)).sum()).collect();
        let mut worst = 0.0f64;
        for (a, &tr_a) in trace.iter().enumerate() {
            for m in 0..n {
                for v in 0..n {
                    // ∂_a(√g g^{mv}) = √g (½ tr(g⁻¹∂_a g) g^{mv} + ∂_a g^{mv})
                    let mut half_tr = 0.0;
                    let mut dginv = 0.0;
                    for p in 0..n {
                        for q in 0..n {
                            let d = self.dg[i3(n, a, p, q)];
                            half_tr += 0.5 * self.ginv[q * n + p] * d;
                            dginv -= self.ginv[m * n + p] * d * self.ginv[q * n + v];
                        }
                    }
                    let mut r = half_tr * self.ginv[m * n + v] + dginv;
                    for p in 0..n {
                        r += self.gamma(m, a, p) * self.ginv[p * n + v] + self.gamma(v, a, p) * self.ginv[m * n + p];
                    }
                    r -= tr_a * self.ginv[m * n + v];
                    worst = worst.max((root * r).abs());
                }
            }
        }
        worst / (root * (1.0 + linalg::norm(&self.dg)))
    }

    /// Largest of `|R^l_mvs + R^l_msv|` and the cyclic first Bianchi sum,
    /// relative to `1 + ‖R‖`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for l in 0..n {
            for m in 0..n {
                for v in 0..n {
                    for s in 0..n {
                        let anti = self.riemann(l, m, v, s) + self.riemann(l, m, s, v);
                        let cyc = self.riemann(l, m, v, s) + self.riemann(l, v, s, m) + self.riemann(l, s, m, v);
                        worst = worst.max(anti.abs()).max(cyc.abs());
                    }
                }
            }
        }
        worst / (1.0 + linalg::norm(&self.riemann))
    }
}
