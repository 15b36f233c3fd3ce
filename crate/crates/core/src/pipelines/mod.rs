//! End-to-end detectors and their flat `key=value` parameterization.

mod classic;
mod edge_drawing;
mod shen_castan;

pub use classic::{
    canny_gradient, canny_hysteresis, first_order_response, first_order_scaled, log_plane, marr_hildreth_plane,
    run_canny, run_first_order, run_laplace, run_log, run_marr_hildreth, CannyParams, FirstOrderFamily,
    FirstOrderParams, LaplaceParams, LogParams, MarrHildrethParams, OperatorSpec,
};
pub use edge_drawing::{edge_drawing_trace, run_edge_drawing, EdParams, EdTrace};
pub use shen_castan::{
    isef_filter, run_shen_castan, shen_castan_trace, IsefParams, ShenCastanLaplacian, ShenCastanParams, ShenCastanTrace,
};

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imgproc::{EdgeMap, GrayImage, RealPlane};
use crate::kernels::LaplaceVariant;
use crate::operators::{LaplaceSpec, MagnitudeMode};
use crate::postprocess::non_max_suppression;

/// Parameter names mapped to their textual values.
pub type ParamMap = BTreeMap<String, String>;

pub const PIPELINE_IDS: [&str; 9] = [
    "first-order",
    "compass",
    "frei-chen",
    "laplace",
    "log",
    "marr-hildreth",
    "canny",
    "shen-castan",
    "ed",
];

/// A fully resolved detector configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Pipeline {
    FirstOrder {
        family: FirstOrderFamily,
        params: FirstOrderParams,
    },
    Laplace(LaplaceParams),
    Log(LogParams),
    MarrHildreth(MarrHildrethParams),
    Canny(CannyParams),
    ShenCastan(ShenCastanParams),
    EdgeDrawing(EdParams),
}

fn allowed_keys(id: &str) -> Option<&'static [&'static str]> {
    Some(match id {
        "first-order" => &["operator", "size", "dilate", "sigma", "threshold", "magnitude"],
        "compass" => &["operator", "size", "dilate", "sigma", "threshold"],
        "frei-chen" => &["mode", "dilate", "sigma", "threshold"],
        "laplace" => &["variant", "size", "dilate", "threshold"],
        "log" => &["variant", "size", "dilate", "sigma", "threshold"],
        "marr-hildreth" => &["variant", "size", "dilate", "sigma", "delta"],
        "canny" => &["operator", "size", "dilate", "sigma", "low", "high"],
        "shen-castan" => &[
            "variant",
            "size",
            "dilate",
            "b",
            "window",
            "ratio",
            "thinning",
            "laplace-threshold",
        ],
        "ed" => &[
            "operator",
            "size",
            "dilate",
            "gauss-size",
            "sigma",
            "grad-thr",
            "anchor-thr",
            "scan-interval",
        ],
        _ => return None,
    })
}

/// Canonical key spelling: lowercase with hyphens.
pub fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('_', "-")
}

struct Reader<'a>(&'a ParamMap);

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.trim())
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e: T::Err| match s.parse::<i64>() {
                Ok(v) if v < 0 => Error::param(key, format!("{v} is outside the supported range (must be >= 0)")),
                _ => Error::param(key, format!("cannot parse {s:?}: {e}")),
            }),
        }
    }

    fn string(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_ascii_lowercase()
    }

    fn operator(&self, default: &str) -> Result<OperatorSpec> {
        Ok(OperatorSpec::new(
            self.string("operator", default).replace('-', "_"),
            self.get("size", 3)?,
            self.get("dilate", 0)?,
        ))
    }

    fn laplace(&self) -> Result<LaplaceSpec> {
        let name = self.string("variant", "v1");
        let variant = LaplaceVariant::parse(&name)
            .ok_or_else(|| Error::param("variant", format!("unknown Laplace variant {name:?}")))?;
        Ok(LaplaceSpec::new(variant, self.get("size", 3)?, self.get("dilate", 0)?))
    }
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("{v} is outside the supported range [{lo}, {hi}]"),
        ))
    }
}

fn require_orthogonal(op: &OperatorSpec) -> Result<()> {
    if op.kernel()?.family() == crate::kernels::Family::Orthogonal {
        Ok(())
    } else {
        Err(Error::param(
            "operator",
            format!("{} is not an orthogonal gradient mask", op.name),
        ))
    }
}

impl Pipeline {
    /// Builds a pipeline from `key=value` pairs; missing keys take the tuned
    /// defaults and unknown keys are rejected.
    pub fn from_params(id: &str, params: &ParamMap) -> Result<Pipeline> {
        let id = normalize_key(id);
        let allowed = allowed_keys(&id).ok_or_else(|| {
            Error::param(
                "pipeline",
                format!("unknown pipeline {id:?}; expected one of {}", PIPELINE_IDS.join(", ")),
            )
        })?;
        let map: ParamMap = params.iter().map(|(k, v)| (normalize_key(k), v.clone())).collect();
        if let Some(k) = map.keys().find(|k| *k != "pipeline" && !allowed.contains(&k.as_str())) {
            return Err(Error::param(k.clone(), format!("not a parameter of the {id} pipeline")));
        }
        let r = Reader(&map);
        let p = match id.as_str() {
            "first-order" | "compass" => {
                let compass = id == "compass";
                let magnitude = match r.string("magnitude", "exact").as_str() {
                    "exact" => MagnitudeMode::Exact,
                    "approx" => MagnitudeMode::Approx,
                    other => {
                        return Err(Error::param(
                            "magnitude",
                            format!("expected exact or approx, got {other:?}"),
                        ))
                    }
                };
                Pipeline::FirstOrder {
                    family: if compass {
                        FirstOrderFamily::Compass
                    } else {
                        FirstOrderFamily::Orthogonal
                    },
                    params: FirstOrderParams {
                        operator: r.operator(if compass { "robinson_compass" } else { "sobel" })?,
                        sigma: r.get("sigma", if compass { 2.5 } else { 2.75 })?,
                        threshold: r.get("threshold", 50)?,
                        magnitude,
                    },
                }
            }
            "frei-chen" => {
                let family = match r.string("mode", "edge").as_str() {
                    "edge" => FirstOrderFamily::FreiChenEdge,
                    "line" => FirstOrderFamily::FreiChenLine,
                    other => return Err(Error::param("mode", format!("expected edge or line, got {other:?}"))),
                };
                Pipeline::FirstOrder {
                    family,
                    params: FirstOrderParams {
                        operator: OperatorSpec::new("frei_chen", 3, r.get("dilate", 0)?),
                        sigma: r.get("sigma", 2.5)?,
                        threshold: r.get("threshold", 50)?,
                        magnitude: MagnitudeMode::Exact,
                    },
                }
            }
            "laplace" => Pipeline::Laplace(LaplaceParams {
                laplace: r.laplace()?,
                threshold: r.get("threshold", 75)?,
            }),
            "log" => Pipeline::Log(LogParams {
                laplace: r.laplace()?,
                sigma: r.get("sigma", 1.8)?,
                threshold: r.get("threshold", 5)?,
            }),
            "marr-hildreth" => Pipeline::MarrHildreth(MarrHildrethParams {
                laplace: r.laplace()?,
                sigma: r.get("sigma", 1.8)?,
                zc_delta: r.get("delta", 85.0)?,
            }),
            "canny" => Pipeline::Canny(CannyParams {
                operator: r.operator("sobel")?,
                sigma: r.get("sigma", 1.5)?,
                low: r.get("low", 80)?,
                high: r.get("high", 90)?,
            }),
            "shen-castan" => {
                let laplacian = if r.string("variant", "v1") == "bli" {
                    ShenCastanLaplacian::Bli
                } else {
                    ShenCastanLaplacian::Mask(r.laplace()?)
                };
                Pipeline::ShenCastan(ShenCastanParams {
                    laplacian,
                    isef: IsefParams {
                        b: r.get("b", 0.9)?,
                        window: r.get("window", 7)?,
                        zc_ratio: r.get("ratio", 0.9)?,
                        thinning_factor: r.get("thinning", 0.5)?,
                        laplace_threshold: r.get("laplace-threshold", 40)?,
                    },
                })
            }
            "ed" => {
                let gauss_size = r.get("gauss-size", 9)?;
                Pipeline::EdgeDrawing(EdParams {
                    operator: r.operator("sobel")?,
                    gauss_size,
                    sigma: r.get("sigma", EdParams::sigma_for_size(gauss_size))?,
                    grad_thr: r.get("grad-thr", 50.0)?,
                    anchor_thr: r.get("anchor-thr", 10.0)?,
                    scan_interval: r.get("scan-interval", 1)?,
                })
            }
            _ => unreachable!("allowed_keys covers every id"),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Pipeline::FirstOrder { family, .. } => match family {
                FirstOrderFamily::Orthogonal => "first-order",
                FirstOrderFamily::Compass => "compass",
                FirstOrderFamily::FreiChenEdge | FirstOrderFamily::FreiChenLine => "frei-chen",
            },
            Pipeline::Laplace(_) => "laplace",
            Pipeline::Log(_) => "log",
            Pipeline::MarrHildreth(_) => "marr-hildreth",
            Pipeline::Canny(_) => "canny",
            Pipeline::ShenCastan(_) => "shen-castan",
            Pipeline::EdgeDrawing(_) => "ed",
        }
    }

    /// Every parameter that affects the output, in a fixed order, without
    /// the `pipeline` key.
    pub fn to_params(&self) -> Vec<(String, String)> {
        fn op(v: &mut Vec<(String, String)>, o: &OperatorSpec) {
            v.push(("operator".into(), o.name.clone()));
            v.push(("size".into(), o.size.to_string()));
            v.push(("dilate".into(), o.dilation.to_string()));
        }
        fn lap(v: &mut Vec<(String, String)>, l: &LaplaceSpec) {
            v.push(("variant".into(), l.variant.label().into()));
            v.push(("size".into(), l.size.to_string()));
            v.push(("dilate".into(), l.dilation.to_string()));
        }
        let mut v: Vec<(String, String)> = Vec::new();
        let kv = |v: &mut Vec<(String, String)>, k: &str, x: &dyn Display| v.push((k.into(), x.to_string()));
        match self {
            Pipeline::FirstOrder { family, params } => {
                match family {
                    FirstOrderFamily::FreiChenEdge => kv(&mut v, "mode", &"edge"),
                    FirstOrderFamily::FreiChenLine => kv(&mut v, "mode", &"line"),
                    _ => {
                        let fam = *family;
                        op(&mut v, &params.operator);
                        if fam == FirstOrderFamily::Orthogonal {
                            let m = if params.magnitude == MagnitudeMode::Exact {
                                "exact"
                            } else {
                                "approx"
                            };
                            kv(&mut v, "magnitude", &m);
                        }
                    }
                }
                if matches!(family, FirstOrderFamily::FreiChenEdge | FirstOrderFamily::FreiChenLine) {
                    kv(&mut v, "dilate", &params.operator.dilation);
                }
                kv(&mut v, "sigma", &params.sigma);
                kv(&mut v, "threshold", &params.threshold);
            }
            Pipeline::Laplace(p) => {
                lap(&mut v, &p.laplace);
                kv(&mut v, "threshold", &p.threshold);
            }
            Pipeline::Log(p) => {
                lap(&mut v, &p.laplace);
                kv(&mut v, "sigma", &p.sigma);
                kv(&mut v, "threshold", &p.threshold);
            }
            Pipeline::MarrHildreth(p) => {
                lap(&mut v, &p.laplace);
                kv(&mut v, "sigma", &p.sigma);
                kv(&mut v, "delta", &p.zc_delta);
            }
            Pipeline::Canny(p) => {
                op(&mut v, &p.operator);
                kv(&mut v, "sigma", &p.sigma);
                kv(&mut v, "low", &p.low);
                kv(&mut v, "high", &p.high);
            }
            Pipeline::ShenCastan(p) => {
                match &p.laplacian {
                    ShenCastanLaplacian::Bli => kv(&mut v, "variant", &"bli"),
                    ShenCastanLaplacian::Mask(l) => lap(&mut v, l),
                }
                kv(&mut v, "b", &p.isef.b);
                kv(&mut v, "window", &p.isef.window);
                kv(&mut v, "ratio", &p.isef.zc_ratio);
                kv(&mut v, "thinning", &p.isef.thinning_factor);
                kv(&mut v, "laplace-threshold", &p.isef.laplace_threshold);
            }
            Pipeline::EdgeDrawing(p) => {
                op(&mut v, &p.operator);
                kv(&mut v, "gauss-size", &p.gauss_size);
                kv(&mut v, "sigma", &p.sigma);
                kv(&mut v, "grad-thr", &p.grad_thr);
                kv(&mut v, "anchor-thr", &p.anchor_thr);
                kv(&mut v, "scan-interval", &p.scan_interval);
            }
        }
        v
    }

    /// `pipeline=<id>` followed by every resolved parameter, one per line.
    pub fn to_sidecar(&self) -> String {
        let mut s = format!("pipeline={}\n", self.id());
        for (k, v) in self.to_params() {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }

    /// Structural invariants that hold regardless of `--unsafe-params`.
    pub fn validate(&self) -> Result<()> {
        match self {
            Pipeline::FirstOrder { family, params } => {
                classic::check_sigma(params.sigma)?;
                match family {
                    FirstOrderFamily::Orthogonal => require_orthogonal(&params.operator)?,
                    FirstOrderFamily::Compass => {
                        params.operator.compass_kernel()?;
                    }
                    _ => {}
                }
            }
            Pipeline::Laplace(p) => {
                p.laplace.kernel()?;
            }
            Pipeline::Log(p) => {
                classic::check_sigma(p.sigma)?;
                p.laplace.kernel()?;
            }
            Pipeline::MarrHildreth(p) => {
                classic::check_sigma(p.sigma)?;
                p.laplace.kernel()?;
                crate::postprocess::ZeroCrossParams::new(p.zc_delta)?;
            }
            Pipeline::Canny(p) => {
                classic::check_sigma(p.sigma)?;
                require_orthogonal(&p.operator)?;
                if p.low > p.high {
                    return Err(Error::param(
                        "low",
                        format!("{} exceeds high threshold {}", p.low, p.high),
                    ));
                }
            }
            Pipeline::ShenCastan(p) => {
                p.isef.validate()?;
                if let ShenCastanLaplacian::Mask(l) = &p.laplacian {
                    l.kernel()?;
                }
            }
            Pipeline::EdgeDrawing(p) => {
                p.validate()?;
                require_orthogonal(&p.operator)?;
            }
        }
        Ok(())
    }

    /// Checks numeric parameters against the ranges explored during tuning.
    pub fn check_ranges(&self) -> Result<()> {
        let dil = |d: usize| in_range("dilate", d as f64, 0.0, 3.0);
        match self {
            Pipeline::FirstOrder { params, .. } => {
                dil(params.operator.dilation)?;
                in_range("sigma", params.sigma, 0.25, 3.5)?;
                in_range("threshold", params.threshold as f64, 30.0, 160.0)?;
            }
            Pipeline::Laplace(p) => {
                dil(p.laplace.dilation)?;
                in_range("threshold", p.threshold as f64, 15.0, 245.0)?;
            }
            Pipeline::Log(p) => {
                dil(p.laplace.dilation)?;
                in_range("sigma", p.sigma, 0.2, 2.0)?;
                in_range("threshold", p.threshold as f64, 5.0, 60.0)?;
            }
            Pipeline::MarrHildreth(p) => {
                dil(p.laplace.dilation)?;
                in_range("sigma", p.sigma, 0.2, 3.0)?;
                in_range("delta", p.zc_delta, 0.0, 255.0)?;
            }
            Pipeline::Canny(p) => {
                dil(p.operator.dilation)?;
                in_range("sigma", p.sigma, 0.2, 3.0)?;
                in_range("low", p.low as f64, 70.0, 150.0)?;
                in_range("high", p.high as f64, 90.0, 200.0)?;
            }
            Pipeline::ShenCastan(p) => {
                if let ShenCastanLaplacian::Mask(l) = &p.laplacian {
                    dil(l.dilation)?;
                }
                in_range("b", p.isef.b, 0.5, 0.9)?;
                in_range("window", p.isef.window as f64, 5.0, 9.0)?;
                in_range("ratio", p.isef.zc_ratio, 0.5, 0.9)?;
                in_range("thinning", p.isef.thinning_factor, 0.0, 0.9)?;
            }
            Pipeline::EdgeDrawing(p) => {
                dil(p.operator.dilation)?;
                in_range("gauss-size", p.gauss_size as f64, 3.0, 9.0)?;
                in_range("grad-thr", p.grad_thr, 10.0, 150.0)?;
                in_range("anchor-thr", p.anchor_thr, 10.0, 60.0)?;
                in_range("scan-interval", p.scan_interval as f64, 1.0, 5.0)?;
            }
        }
        Ok(())
    }

    pub fn run(&self, gray: &GrayImage) -> Result<EdgeMap> {
        match self {
            Pipeline::FirstOrder { family, params } => run_first_order(gray, params, *family),
            Pipeline::Laplace(p) => run_laplace(gray, p),
            Pipeline::Log(p) => run_log(gray, p),
            Pipeline::MarrHildreth(p) => run_marr_hildreth(gray, p),
            Pipeline::Canny(p) => run_canny(gray, p),
            Pipeline::ShenCastan(p) => run_shen_castan(gray, p),
            Pipeline::EdgeDrawing(p) => run_edge_drawing(gray, p),
        }
    }

    /// The real-valued plane the final decision is taken on: gradient
    /// magnitude, second-order response, suppressed magnitude, etc.
    pub fn response(&self, gray: &GrayImage) -> Result<RealPlane> {
        match self {
            Pipeline::FirstOrder { family, params } => first_order_response(gray, params, *family),
            Pipeline::Laplace(p) => crate::operators::laplace(&gray.to_plane(), p.laplace),
            Pipeline::Log(p) => log_plane(gray, p),
            Pipeline::MarrHildreth(p) => marr_hildreth_plane(gray, p),
            Pipeline::Canny(p) => Ok(non_max_suppression(&canny_gradient(gray, p)?)),
            Pipeline::ShenCastan(p) => Ok(shen_castan_trace(gray, p)?.gradient),
            Pipeline::EdgeDrawing(p) => Ok(edge_drawing_trace(gray, p)?.gradient),
        }
    }
}

/// Parses a flat `key=value` text; `#` starts a comment, blank lines are
/// ignored and later keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<ParamMap> {
    let mut map = ParamMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::param(format!("line {}", n + 1), format!("expected key=value, got {line:?}")))?;
        let k = normalize_key(k);
        if k.is_empty() {
            return Err(Error::param(format!("line {}", n + 1), "empty key"));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}
