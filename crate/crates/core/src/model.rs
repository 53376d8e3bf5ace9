use crate::csom::CsomState;
use crate::error::Result;
use crate::matrix::UnitMatrix;
use crate::som::SomState;
use crate::topology::GridTopology;
use crate::OnlineModel;

/// Either model, for code that picks one at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Som(SomState),
    Csom(CsomState),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Som(_) => "som",
            Model::Csom(_) => "csom",
        }
    }

    pub fn as_csom(&self) -> Option<&CsomState> {
        match self {
            Model::Csom(m) => Some(m),
            Model::Som(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights().dim()
    }
}

impl OnlineModel for Model {
    fn train_step(&mut self, x: &[f64]) -> Result<usize> {
        match self {
            Model::Som(m) => m.train_step(x),
            Model::Csom(m) => m.train_step(x),
        }
    }

    fn weights(&self) -> &UnitMatrix {
        match self {
            Model::Som(m) => m.weights(),
            Model::Csom(m) => OnlineModel::weights(m),
        }
    }

    fn topology(&self) -> &GridTopology {
        match self {
            Model::Som(m) => m.topology(),
            Model::Csom(m) => OnlineModel::topology(m),
        }
    }
}

impl From<SomState> for Model {
    fn from(m: SomState) -> Self {
        Model::Som(m)
    }
}

impl From<CsomState> for Model {
    fn from(m: CsomState) -> Self {
        Model::Csom(m)
    }
}
