//! User grouping and frame-level sum-rate.
//!
//! A frame is split into one slot per group, with slot length proportional
//! to group size: a NOMA pair gets `2/K` of the frame and a lone user `1/K`.
//! Under that rule a pair wins over serving its members separately exactly
//! when the pair's rate gap is non-negative, so the adaptive plan never does
//! worse than plain TDMA.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use crate::channel::snr_from_gain;
use crate::error::{ensure, Error, Result};
use crate::rate;
use crate::region::{region_for_snr, NomaRegion, ScaSettings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserChannel {
    pub id: usize,
    pub gain: f64,
    pub snr: f64,
}

/// Users sorted by ascending gain, ties broken by id.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannelSet {
    users: Vec<UserChannel>,
}

impl UserChannelSet {
    pub fn new(mut users: Vec<UserChannel>) -> Result<Self> {
        let mut seen = HashSet::new();
        for u in &users {
            ensure(
                u.gain >= 0.0 && u.gain.is_finite(),
                "channel gain",
                u.gain,
                "finite and >= 0",
            )?;
            ensure(
                u.snr >= 0.0 && u.snr.is_finite(),
                "user SNR",
                u.snr,
                "finite and >= 0",
            )?;
            if !seen.insert(u.id) {
                return Err(Error::InconsistentPlan(format!(
                    "duplicate user id {}",
                    u.id
                )));
            }
        }
        users.sort_by(|a, b| a.gain.total_cmp(&b.gain).then(a.id.cmp(&b.id)));
        Ok(Self { users })
    }

    /// Builds the set from `(id, gain)` pairs with a common LED power and
    /// noise power.
    pub fn from_gains(gains: &[(usize, f64)], p_led: f64, noise_power: f64) -> Result<Self> {
        ensure(p_led > 0.0, "LED power", p_led, "> 0")?;
        ensure(noise_power > 0.0, "noise power", noise_power, "> 0")?;
        Self::new(
            gains
                .iter()
                .map(|&(id, gain)| UserChannel {
                    id,
                    gain,
                    snr: snr_from_gain(gain, p_led, noise_power),
                })
                .collect(),
        )
    }

    pub fn users(&self) -> &[UserChannel] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&UserChannel> {
        self.users.iter().find(|u| u.id == id)
    }

    fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.users.iter().map(|u| u.id)
    }
}

/// Squared gain ratio `h_strong^2 / h_weak^2`.
fn squared_ratio(weak: &UserChannel, strong: &UserChannel) -> f64 {
    (strong.gain / weak.gain).powi(2)
}

/// Source of NOMA regions keyed by weak-user SNR.
pub trait RegionSource {
    fn region(&self, snr: f64) -> Result<NomaRegion>;
}

impl<F> RegionSource for F
where
    F: Fn(f64) -> Result<NomaRegion>,
{
    fn region(&self, snr: f64) -> Result<NomaRegion> {
        self(snr)
    }
}

/// Memoised regions on a geometric SNR grid with relative step
/// [`RegionCache::STEP`].
///
/// Each SNR is rounded *down* to its grid point. The region only grows with
/// SNR, so the cached interval is contained in the exact one and every pair it
/// admits still has a non-negative gap.
#[derive(Debug)]
pub struct RegionCache {
    settings: ScaSettings,
    memo: RwLock<HashMap<i64, NomaRegion>>,
}

impl RegionCache {
    pub const STEP: f64 = 1e-3;

    pub fn new(settings: ScaSettings) -> Self {
        Self {
            settings,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn settings(&self) -> &ScaSettings {
        &self.settings
    }

    /// Grid point at or below `snr`.
    pub fn grid_snr(snr: f64) -> f64 {
        Self::snr_of(Self::key(snr))
    }

    fn key(snr: f64) -> i64 {
        (snr.ln() / Self::STEP.ln_1p()).floor() as i64
    }

    fn snr_of(key: i64) -> f64 {
        (key as f64 * Self::STEP.ln_1p()).exp()
    }

    pub fn len(&self) -> usize {
        self.memo.read().expect("region memo poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl RegionSource for RegionCache {
    fn region(&self, snr: f64) -> Result<NomaRegion> {
        ensure(
            snr > 0.0 && snr.is_finite(),
            "weak-user SNR",
            snr,
            "finite and > 0",
        )?;
        let key = Self::key(snr);
        if let Some(r) = self.memo.read().expect("region memo poisoned").get(&key) {
            return Ok(*r);
        }
        let region = region_for_snr(Self::snr_of(key), &self.settings)?;
        self.memo
            .write()
            .expect("region memo poisoned")
            .insert(key, region);
        Ok(region)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairingPlan {
    /// `(weak id, strong id)` in the order they were formed.
    pub pairs: Vec<(usize, usize)>,
    pub singletons: Vec<usize>,
}

impl fmt::Display for PairingPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, s) in &self.pairs {
            writeln!(f, "PAIR {w} {s}")?;
        }
        for i in &self.singletons {
            writeln!(f, "SOLO {i}")?;
        }
        Ok(())
    }
}

impl FromStr for PairingPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut plan = PairingPlan::default();
        for (n, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::PlanSyntax {
                line: n + 1,
                text: line.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |k: usize| fields[k].parse::<usize>().map_err(|_| bad());
            match fields.as_slice() {
                ["PAIR", _, _] => plan.pairs.push((num(1)?, num(2)?)),
                ["SOLO", _] => plan.singletons.push(num(1)?),
                _ => return Err(bad()),
            }
        }
        Ok(plan)
    }
}

impl PairingPlan {
    pub fn group_count(&self) -> usize {
        self.pairs.len() + self.singletons.len()
    }
}

/// Weak-to-strong pairing that only keeps pairs whose squared gain ratio
/// lies in the weak user's NOMA region.
///
/// Weak candidates are visited from the weakest user upwards; for each, the
/// strong partner is searched from the strongest user downwards and the first
/// unpaired user in region is taken. Zero-gain users are never paired.
pub fn adaptive_pairing(
    users: &UserChannelSet,
    regions: &impl RegionSource,
) -> Result<PairingPlan> {
    let list = users.users();
    let k = list.len();
    let mut paired = vec![false; k];
    let mut pairs = Vec::new();
    for i in 0..k.saturating_sub(1) {
        if paired[i] || list[i].gain <= 0.0 || list[i].snr <= 0.0 {
            continue;
        }
        let region = regions.region(list[i].snr)?;
        if region.is_empty() {
            continue;
        }
        for j in (i + 1..k).rev() {
            if !paired[j] && region.contains(squared_ratio(&list[i], &list[j])) {
                paired[i] = true;
                paired[j] = true;
                pairs.push((list[i].id, list[j].id));
                break;
            }
        }
    }
    let singletons = list
        .iter()
        .zip(&paired)
        .filter(|(_, &p)| !p)
        .map(|(u, _)| u.id)
        .collect();
    Ok(PairingPlan { pairs, singletons })
}

/// Always pairs the i-th weakest with the i-th strongest user; the median user
/// of an odd-sized set is served alone.
pub fn forced_pairing(users: &UserChannelSet) -> PairingPlan {
    let list = users.users();
    let k = list.len();
    let pairs = (0..k / 2)
        .map(|i| (list[i].id, list[k - 1 - i].id))
        .collect();
    let singletons = if k % 2 == 1 {
        vec![list[k / 2].id]
    } else {
        Vec::new()
    };
    PairingPlan { pairs, singletons }
}

pub fn tdma_plan(users: &UserChannelSet) -> PairingPlan {
    PairingPlan {
        pairs: Vec::new(),
        singletons: users.ids().collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupOutcome {
    pub members: Vec<usize>,
    pub slot_fraction: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleOutcome {
    pub groups: Vec<GroupOutcome>,
    pub per_user_rates: BTreeMap<usize, f64>,
    pub sum_rate: f64,
}

/// Frame sum-rate of `plan` in bits/s/Hz.
pub fn evaluate_schedule(plan: &PairingPlan, users: &UserChannelSet) -> Result<ScheduleOutcome> {
    let k = users.len();
    if k == 0 {
        return Err(Error::InconsistentPlan("no users".into()));
    }
    let mut covered = HashSet::new();
    let members = plan
        .pairs
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .chain(plan.singletons.iter().copied());
    for id in members {
        if users.get(id).is_none() {
            return Err(Error::InconsistentPlan(format!("unknown user {id}")));
        }
        if !covered.insert(id) {
            return Err(Error::InconsistentPlan(format!(
                "user {id} scheduled twice"
            )));
        }
    }
    if covered.len() != k {
        return Err(Error::InconsistentPlan(format!(
            "{} of {k} users scheduled",
            covered.len()
        )));
    }

    let user = |id: usize| users.get(id).expect("coverage checked above");
    let mut groups = Vec::with_capacity(plan.group_count());
    let mut per_user_rates = BTreeMap::new();

    for &(a, b) in &plan.pairs {
        let (ua, ub) = (user(a), user(b));
        let (weak, strong) = if (ua.gain, ua.id) <= (ub.gain, ub.id) {
            (ua, ub)
        } else {
            (ub, ua)
        };
        let tau = 2.0 / k as f64;
        let (rw, rs) = rate::noma_user_rates(weak.snr, strong.snr, tau);
        per_user_rates.insert(weak.id, rw);
        per_user_rates.insert(strong.id, rs);
        groups.push(GroupOutcome {
            members: vec![weak.id, strong.id],
            slot_fraction: tau,
            rate: rw + rs,
        });
    }
    for &id in &plan.singletons {
        let tau = 1.0 / k as f64;
        let r = rate::single_user_rate(user(id).snr, tau);
        per_user_rates.insert(id, r);
        groups.push(GroupOutcome {
            members: vec![id],
            slot_fraction: tau,
            rate: r,
        });
    }
    let sum_rate = groups.iter().map(|g| g.rate).sum();
    Ok(ScheduleOutcome {
        groups,
        per_user_rates,
        sum_rate,
    })
}

/// The three multiple-access schemes compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Tdma,
    Forced,
    Proposed,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Tdma, Scheme::Forced, Scheme::Proposed];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Tdma => "tdma",
            Scheme::Forced => "forced",
            Scheme::Proposed => "proposed",
        }
    }

    pub fn plan(self, users: &UserChannelSet, regions: &impl RegionSource) -> Result<PairingPlan> {
        match self {
            Scheme::Tdma => Ok(tdma_plan(users)),
            Scheme::Forced => Ok(forced_pairing(users)),
            Scheme::Proposed => adaptive_pairing(users, regions),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::PairState;

    const NOISE: f64 = 1e-14;

    /// Users with the given SNRs at unit LED power.
    fn users_from_snrs(snrs: &[f64]) -> UserChannelSet {
        let gains: Vec<(usize, f64)> = snrs
            .iter()
            .enumerate()
            .map(|(i, &g)| (i + 1, (g * NOISE).sqrt()))
            .collect();
        UserChannelSet::from_gains(&gains, 1.0, NOISE).unwrap()
    }

    fn cache() -> RegionCache {
        RegionCache::new(ScaSettings::default())
    }

    #[test]
    fn single_user() {
        let u = users_from_snrs(&[100.0]);
        let plan = adaptive_pairing(&u, &cache()).unwrap();
        assert!(plan.pairs.is_empty());
        assert_eq!(plan.singletons, vec![1]);
        assert_eq!(forced_pairing(&u).singletons, vec![1]);
        let out = evaluate_schedule(&plan, &u).unwrap();
        assert!((out.sum_rate - 5.468022778172452).abs() < 1e-9);
    }

    #[test]
    fn equal_gains_never_pair() {
        for g in [1.0, 10.0, 100.0, 1000.0] {
            assert!(rate::gap(g, 1.0) < 0.0);
            let plan = adaptive_pairing(&users_from_snrs(&[g; 4]), &cache()).unwrap();
            assert!(plan.pairs.is_empty());
            assert_eq!(plan.singletons.len(), 4);
        }
    }

    #[test]
    fn only_in_region_pairs_are_formed() {
        // Region at snr 100 is about [3.13, 1.8e3]: r(1,4) = 10, r(2,3) = 1.2.
        let u = users_from_snrs(&[100.0, 200.0, 240.0, 1000.0]);
        let plan = adaptive_pairing(&u, &cache()).unwrap();
        assert_eq!(plan.pairs, vec![(1, 4)]);
        assert_eq!(plan.singletons, vec![2, 3]);
    }

    #[test]
    fn strongest_in_region_partner_is_preferred() {
        // r(1,4) = 5000 is outside the snr-100 region, r(1,3) = 50 is inside.
        let u = users_from_snrs(&[100.0, 150.0, 5000.0, 5e5]);
        let plan = adaptive_pairing(&u, &cache()).unwrap();
        assert_eq!(plan.pairs[0], (1, 3));
    }

    #[test]
    fn forced_pairing_shapes() {
        let six = users_from_snrs(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(forced_pairing(&six).pairs, vec![(1, 6), (2, 5), (3, 4)]);
        let five = users_from_snrs(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let plan = forced_pairing(&five);
        assert_eq!(plan.pairs, vec![(1, 5), (2, 4)]);
        assert_eq!(plan.singletons, vec![3]);
    }

    #[test]
    fn tdma_plan_has_no_pairs() {
        let u = users_from_snrs(&[5.0, 1.0, 3.0]);
        let plan = tdma_plan(&u);
        assert!(plan.pairs.is_empty());
        assert_eq!(plan.singletons, vec![2, 3, 1]);
    }

    #[test]
    fn two_user_schedules() {
        let u = users_from_snrs(&[100.0, 400.0]);
        let pair = PairingPlan {
            pairs: vec![(1, 2)],
            singletons: vec![],
        };
        let noma = evaluate_schedule(&pair, &u).unwrap();
        assert!((noma.sum_rate - 6.559181434762473).abs() < 1e-9);
        assert_eq!(noma.groups[0].slot_fraction, 1.0);
        let tdma = evaluate_schedule(&tdma_plan(&u), &u).unwrap();
        assert!((tdma.sum_rate - 6.455695347320181).abs() < 1e-9);
        let state = PairState::new(100.0, 4.0).unwrap();
        assert!((tdma.sum_rate - rate::tdma_pair_rate(&state, 1.0)).abs() < 1e-9);
    }

    #[test]
    fn outcome_invariants() {
        let u = users_from_snrs(&[50.0, 70.0, 900.0, 3000.0, 20.0]);
        let plan = adaptive_pairing(&u, &cache()).unwrap();
        let out = evaluate_schedule(&plan, &u).unwrap();
        let slots: f64 = out.groups.iter().map(|g| g.slot_fraction).sum();
        assert!((slots - 1.0).abs() < 1e-12);
        let total: f64 = out.per_user_rates.values().sum();
        assert!((total - out.sum_rate).abs() < 1e-12);
        assert!(out.per_user_rates.values().all(|&r| r >= 0.0));
        assert_eq!(out.per_user_rates.len(), 5);
    }

    #[test]
    fn inconsistent_plans_are_rejected() {
        let u = users_from_snrs(&[1.0, 2.0]);
        let dup = PairingPlan {
            pairs: vec![(1, 2)],
            singletons: vec![2],
        };
        assert!(evaluate_schedule(&dup, &u).is_err());
        let missing = PairingPlan {
            pairs: vec![],
            singletons: vec![1],
        };
        assert!(evaluate_schedule(&missing, &u).is_err());
        let unknown = PairingPlan {
            pairs: vec![],
            singletons: vec![1, 2, 9],
        };
        assert!(evaluate_schedule(&unknown, &u).is_err());
    }

    #[test]
    fn zero_gain_users_stay_alone() {
        let gains = [(1, 0.0), (2, 1e-6), (3, 3e-6)];
        let u = UserChannelSet::from_gains(&gains, 1.0, NOISE).unwrap();
        let plan = adaptive_pairing(&u, &cache()).unwrap();
        assert!(plan.singletons.contains(&1));
        assert!(plan.pairs.iter().all(|&(w, s)| w != 1 && s != 1));
        let out = evaluate_schedule(&plan, &u).unwrap();
        assert_eq!(out.per_user_rates[&1], 0.0);
        // Forced pairing still pairs the dead user; FTPA then starves both.
        let forced = evaluate_schedule(&forced_pairing(&u), &u).unwrap();
        assert_eq!(forced.per_user_rates[&1], 0.0);
        assert_eq!(forced.per_user_rates[&3], 0.0);
    }

    #[test]
    fn plan_text_form() {
        let plan = PairingPlan {
            pairs: vec![(1, 6), (2, 5)],
            singletons: vec![3, 4],
        };
        let text = plan.to_string();
        assert_eq!(text, "PAIR 1 6\nPAIR 2 5\nSOLO 3\nSOLO 4\n");
        assert_eq!(text.parse::<PairingPlan>().unwrap(), plan);
        assert!("PAIR 1".parse::<PairingPlan>().is_err());
        assert!("TRIO 1 2 3".parse::<PairingPlan>().is_err());
        assert!("SOLO x".parse::<PairingPlan>().is_err());
    }

    #[test]
    fn cache_rounds_down_and_memoises() {
        let c = cache();
        let g = 123.456;
        let grid = RegionCache::grid_snr(g);
        assert!(grid <= g && grid > g / (1.0 + RegionCache::STEP) * (1.0 - 1e-12));
        let a = c.region(g).unwrap();
        let b = c.region(g * (1.0 + 1e-9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(c.len(), 1);
        assert_eq!(a.snr, grid);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let users = vec![
            UserChannel {
                id: 1,
                gain: 1e-6,
                snr: 100.0,
            },
            UserChannel {
                id: 1,
                gain: 2e-6,
                snr: 400.0,
            },
        ];
        assert!(UserChannelSet::new(users).is_err());
    }
}
