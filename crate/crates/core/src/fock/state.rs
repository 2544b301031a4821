use num_complex::Complex64;

use super::{DensityOperator, FockError, KrausChannel, ModeRegister, ModeUnitary, PureState};

/// Operations shared by the sparse pure-state and dense density-operator
/// representations, so optical circuits can be wired once and run on either.
pub trait OpticalState: Sized + Clone {
    fn register(&self) -> &ModeRegister;

    fn max_photons(&self) -> u32;

    fn with_vacuum_mode(&self, label: &str) -> Result<Self, FockError>;

    /// Tensor product with a pure state on fresh modes.
    fn attach(&self, other: &PureState) -> Result<Self, FockError>;

    fn apply_unitary(&self, op: &ModeUnitary) -> Result<Self, FockError>;

    /// Pure loss of transmission `t` on `mode`.
    fn apply_loss(&self, mode: &str, t: f64) -> Result<Self, FockError>;

    fn relabel(&self, old: &str, new: &str) -> Result<Self, FockError>;
}

/// `base`, or `base` with the smallest numeric suffix not yet in `register`.
pub fn fresh_label(register: &ModeRegister, base: &str) -> String {
    if !register.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|l| !register.contains(l))
        .expect("unbounded label search")
}

impl OpticalState for PureState {
    fn register(&self) -> &ModeRegister {
        PureState::register(self)
    }

    fn max_photons(&self) -> u32 {
        PureState::max_photons(self)
    }

    fn with_vacuum_mode(&self, label: &str) -> Result<Self, FockError> {
        PureState::with_vacuum_mode(self, label)
    }

    fn attach(&self, other: &PureState) -> Result<Self, FockError> {
        self.tensor(other)
    }

    fn apply_unitary(&self, op: &ModeUnitary) -> Result<Self, FockError> {
        PureState::apply_unitary(self, op)
    }

    /// Dilation: the lost light goes to a fresh environment mode that stays
    /// in the register until it is traced out.
    fn apply_loss(&self, mode: &str, t: f64) -> Result<Self, FockError> {
        check_transmission(t)?;
        self.register().index_of(mode)?;
        if t == 1.0 {
            return Ok(self.clone());
        }
        let env = fresh_label(self.register(), &format!("{mode}.env"));
        let s = t.sqrt();
        let r = (1.0 - t).sqrt();
        let bs = ModeUnitary::new(
            vec![mode.to_string(), env.clone()],
            nalgebra::DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(s, 0.0),
                    Complex64::new(r, 0.0),
                    Complex64::new(r, 0.0),
                    Complex64::new(-s, 0.0),
                ],
            ),
        )?;
        self.with_vacuum_mode(&env)?.apply_unitary(&bs)
    }

    fn relabel(&self, old: &str, new: &str) -> Result<Self, FockError> {
        PureState::relabel(self, old, new)
    }
}

impl OpticalState for DensityOperator {
    fn register(&self) -> &ModeRegister {
        DensityOperator::register(self)
    }

    fn max_photons(&self) -> u32 {
        DensityOperator::max_photons(self)
    }

    fn with_vacuum_mode(&self, label: &str) -> Result<Self, FockError> {
        DensityOperator::with_vacuum_mode(self, label)
    }

    fn attach(&self, other: &PureState) -> Result<Self, FockError> {
        self.tensor(&DensityOperator::from_pure(other))
    }

    fn apply_unitary(&self, op: &ModeUnitary) -> Result<Self, FockError> {
        DensityOperator::apply_unitary(self, op)
    }

    fn apply_loss(&self, mode: &str, t: f64) -> Result<Self, FockError> {
        check_transmission(t)?;
        if t == 1.0 {
            self.register().index_of(mode)?;
            return Ok(self.clone());
        }
        self.apply_channel(&KrausChannel::loss(mode, t, self.max_photons()))
    }

    fn relabel(&self, old: &str, new: &str) -> Result<Self, FockError> {
        DensityOperator::relabel(self, old, new)
    }
}

fn check_transmission(t: f64) -> Result<(), FockError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(FockError::InvalidParameter(format!(
            "transmission {t} outside [0, 1]"
        )))
    }
}
