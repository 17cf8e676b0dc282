use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use mdtgn::conservation::total_charge;
use mdtgn::dirac::SolutionHistory;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const FIELDS_HEADER: &str = "x,t,re_u,im_u,re_v,im_v,A0,A1,E";

/// Output directory, created on first use.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn create(&self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok((path, BufWriter::new(file)))
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        let (path, mut w) = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))
    }

    /// One row per node and layer; `{}` on `f64` is the shortest string
    /// that parses back to the same value.
    pub fn write_fields(&self, name: &str, sol: &SolutionHistory) -> Result<()> {
        let (path, mut w) = self.create(name)?;
        let io = |e| CliError::io(&path, e);
        let grid = sol.grid();
        let (s, em) = (&sol.spinor, &sol.em);
        writeln!(w, "{FIELDS_HEADER}").map_err(io)?;
        for k in 0..grid.layers() {
            let t = grid.t(k);
            for i in 0..grid.n_x {
                let (u, v) = (s.u.at(i, k), s.v.at(i, k));
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    grid.x(i as isize),
                    t,
                    u.re,
                    u.im,
                    v.re,
                    v.im,
                    em.a0.at(i, k),
                    em.a1.at(i, k),
                    em.e.at(i, k)
                )
                .map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }

    pub fn write_series(&self, name: &str, points: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
        let (path, mut w) = self.create(name)?;
        let io = |e| CliError::io(&path, e);
        writeln!(w, "t,value").map_err(io)?;
        for (t, v) in points {
            writeln!(w, "{t},{v}").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    /// Per-layer series for external plotting under `plot/`.
    pub fn write_plot_data(&self, sol: &SolutionHistory) -> Result<()> {
        let grid = sol.grid();
        let layer_sup = |f: &dyn Fn(usize) -> f64| (0..grid.layers()).map(|k| (grid.t(k), f(k))).collect::<Vec<_>>();
        let sup = |xs: &[f64]| xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let sup_c = |xs: &[mdtgn::Complex64]| xs.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        self.write_series("plot/charge.csv", layer_sup(&|k| total_charge(&sol.spinor, k)))?;
        self.write_series("plot/sup_u.csv", layer_sup(&|k| sup_c(sol.spinor.u.layer(k))))?;
        self.write_series("plot/sup_v.csv", layer_sup(&|k| sup_c(sol.spinor.v.layer(k))))?;
        self.write_series("plot/sup_A0.csv", layer_sup(&|k| sup(sol.em.a0.layer(k))))?;
        self.write_series("plot/sup_A1.csv", layer_sup(&|k| sup(sol.em.a1.layer(k))))?;
        self.write_series("plot/sup_E.csv", layer_sup(&|k| sup(sol.em.e.layer(k))))
    }
}

