use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants behind the schedules and the information criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Moment exponent of the importance ratio.
    #[serde(default = "default_q")]
    pub q: f64,
    /// Tail exponent of the noise, in `(0, 2]`.
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_m_w")]
    pub m_w: f64,
    /// Defaults to its lower bound `1/eta + 1/2`.
    #[serde(default)]
    pub m_eta: Option<f64>,
    #[serde(default = "default_m_k")]
    pub m_k: f64,
    #[serde(default = "default_s_a")]
    pub s_a: f64,
}

fn default_q() -> f64 {
    2.0
}
fn default_eta() -> f64 {
    2.0
}
fn default_m_w() -> f64 {
    1.0
}
fn default_m_k() -> f64 {
    5.0
}
fn default_s_a() -> f64 {
    2.0
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            q: default_q(),
            eta: default_eta(),
            m_w: default_m_w(),
            m_eta: None,
            m_k: default_m_k(),
            s_a: default_s_a(),
        }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.q > 0.0 && self.q.is_finite()) {
            return bad(format!("q must be positive, got {}", self.q));
        }
        if !(self.eta > 0.0 && self.eta <= 2.0) {
            return bad(format!("eta must lie in (0, 2], got {}", self.eta));
        }
        if !(self.m_w > 0.0 && self.m_w.is_finite()) {
            return bad(format!("m_w must be positive, got {}", self.m_w));
        }
        if !(self.m_k > 0.0 && self.m_k.is_finite()) {
            return bad(format!("m_k must be positive, got {}", self.m_k));
        }
        if !(self.s_a >= 0.0 && self.s_a.is_finite()) {
            return bad(format!("s_a must be non-negative, got {}", self.s_a));
        }
        if let Some(m) = self.m_eta {
            if !(m >= self.m_eta_floor() && m.is_finite()) {
                return bad(format!(
                    "m_eta must be at least 1/eta + 1/2 = {}, got {m}",
                    self.m_eta_floor()
                ));
            }
        }
        Ok(())
    }

    fn m_eta_floor(&self) -> f64 {
        1.0 / self.eta + 0.5
    }

    pub fn m_eta(&self) -> f64 {
        self.m_eta.unwrap_or_else(|| self.m_eta_floor())
    }

    /// Evaluates every schedule at `(n, p)`.
    pub fn resolve(&self, n: usize, p: usize, mode: ScheduleMode) -> Result<ResolvedSchedule> {
        self.validate()?;
        Ok(ResolvedSchedule {
            n,
            p,
            mode,
            c_n: compute_cn(n, p)?,
            d_n: compute_dn(n, p, self)?,
            b_n: compute_bn(n, p, self)?,
            k_n: compute_kn(n, p, self, mode)?,
            s_a: self.s_a,
            q: self.q,
        })
    }
}

/// IWOGA schedules use `d_n`; plain OGA uses `c_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Iwoga,
    Oga,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSchedule {
    pub n: usize,
    pub p: usize,
    pub mode: ScheduleMode,
    pub c_n: f64,
    pub d_n: f64,
    pub b_n: f64,
    pub k_n: usize,
    pub s_a: f64,
    pub q: f64,
}

impl ResolvedSchedule {
    /// Rate entering the criterion penalty: `d_n` for IWOGA, `c_n` for OGA.
    pub fn penalty_rate(&self) -> f64 {
        match self.mode {
            ScheduleMode::Iwoga => self.d_n,
            ScheduleMode::Oga => self.c_n,
        }
    }
}

fn check_sizes(n: usize, p: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Invalid(format!("schedules need n >= 2, got {n}")));
    }
    if p < 2 {
        return Err(Error::Invalid(format!(
            "schedules need p >= 2 so that log p > 0, got {p}"
        )));
    }
    Ok(())
}

/// `c_n = sqrt(log p / n)`.
pub fn compute_cn(n: usize, p: usize) -> Result<f64> {
    check_sizes(n, p)?;
    Ok(((p as f64).ln() / n as f64).sqrt())
}

/// `d_n = c_n` for `q > 1`, else `c_n^{2q/(1+q)} (log n)^{1/η + 1/2}`.
pub fn compute_dn(n: usize, p: usize, cfg: &ScheduleConfig) -> Result<f64> {
    let c = compute_cn(n, p)?;
    if cfg.q > 1.0 {
        Ok(c)
    } else {
        let q = cfg.q;
        Ok(c.powf(2.0 * q / (1.0 + q)) * (n as f64).ln().powf(1.0 / cfg.eta + 0.5))
    }
}

/// Trimming level `b_n`.
pub fn compute_bn(n: usize, p: usize, cfg: &ScheduleConfig) -> Result<f64> {
    let c = compute_cn(n, p)?;
    if cfg.q <= 1.0 {
        Ok(cfg.m_w * c.powf(-2.0 / (1.0 + cfg.q)))
    } else {
        Ok(cfg.m_w / c * (n as f64).ln().powf(-cfg.m_eta()))
    }
}

/// Iteration cap `⌊M_k / d_n⌋` (IWOGA) or `⌊M_k / c_n⌋` (OGA), clamped to
/// `[1, min(p, n − 2)]`.
pub fn compute_kn(n: usize, p: usize, cfg: &ScheduleConfig, mode: ScheduleMode) -> Result<usize> {
    let rate = match mode {
        ScheduleMode::Iwoga => compute_dn(n, p, cfg)?,
        ScheduleMode::Oga => compute_cn(n, p)?,
    };
    let raw = (cfg.m_k / rate).floor();
    let cap = p.min(n.saturating_sub(2)).max(1);
    Ok((raw.max(1.0) as usize).min(cap))
}
